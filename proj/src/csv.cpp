#include "nskv/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nskv/error.hpp"

namespace nskv {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_diagnostics_csv(const std::string& path, const DiagSeries& series, double tau) {
  auto out = open_out(path);
  out << "t_tau,energy,enstrophy,max_speed,align_cos,boundary_frac\n";
  for (const DiagRow& r : series.rows)
    out << format_number(r.t / tau) << ',' << format_number(r.energy) << ',' << format_number(r.enstrophy) << ','
        << format_number(r.max_speed) << ',' << format_number(r.align_cos) << ','
        << format_number(r.boundary_frac) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

DiagSeries read_diagnostics_csv(const std::string& path, double tau) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line != "t_tau,energy,enstrophy,max_speed,align_cos,boundary_frac")
    throw IntegrityError("'" + path + "': unexpected diagnostics header");
  DiagSeries s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double v[6];
    char comma;
    for (int i = 0; i < 6; ++i) {
      if (!(ls >> v[i])) throw IntegrityError("'" + path + "': malformed row");
      if (i < 5) ls >> comma;
    }
    s.push(DiagRow{v[0] * tau, v[1], v[2], v[3], v[4], v[5]});
  }
  return s;
}

void write_marginal_csv(const std::string& path, const MarginalSeries& m, double tau) {
  auto out = open_out(path);
  if (m.axis == "k3")
    out << "# S3(k3) = (2pi)^3 step^2 sum_{k1,k2} |k|^2 |v|^2; sum * step = total enstrophy\n";
  else
    out << "# S3(x3) = sum_{x1,x2} |w|^2 dx1 dx2 over one transverse period\n";
  out << "t_tau," << m.axis << ",density\n";
  for (std::size_t r = 0; r < m.rows.size(); ++r)
    for (std::size_t i = 0; i < m.coords.size(); ++i)
      out << format_number(m.times[r] / tau) << ',' << format_number(m.coords[i]) << ','
          << format_number(m.rows[r][i]) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace nskv
