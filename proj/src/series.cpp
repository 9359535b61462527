#include "series.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace qdnls::series {

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("row width " + std::to_string(row.size()) + " does not match " +
                           std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
  return os.str();
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void write_table(const Table& t, const std::string& path, const nlohmann::json& meta) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << to_csv(t);
  if (!out) throw IoError("write failed: " + path);
  if (!meta.is_null()) write_json(meta, path + ".json");
}

Table reduced_table(const reduced::Trajectory& traj, double mu) {
  Table t{{"t", "phi1", "K", "H", "het_residual"}, {}};
  for (const auto& s : traj.samples) {
    t.add({s.t, s.phi1, s.K, reduced::hamiltonian(s, mu), reduced::heteroclinic_residual(s)});
  }
  return t;
}

Table toy_table(const toy::Trajectory& traj) {
  Table t{{"t", "re_a1", "im_a1", "re_a2", "im_a2", "re_b1", "im_b1", "re_b2", "im_b2", "K",
           "inv1", "inv2", "inv3", "inv4"},
          {}};
  for (const auto& s : traj.samples) {
    const auto inv = toy::invariants(s.c);
    std::vector<double> row{s.t};
    for (const auto& z : s.c) {
      row.push_back(z.real());
      row.push_back(z.imag());
    }
    row.push_back(std::norm(s.c[0]));
    row.insert(row.end(), inv.begin(), inv.end());
    t.add(std::move(row));
  }
  return t;
}

const std::vector<std::string>& pde_columns() {
  static const std::vector<std::string> cols{"t",      "M",      "E",      "P",   "I_a1",
                                             "I_a2",   "I_b1",   "I_b2",   "A_L", "A_H",
                                             "apriori_ratio"};
  return cols;
}

}  // namespace qdnls::series
