#pragma once

// Deterministic CSV tables with JSON sidecars.

#include <string>
#include <vector>

#include <json.hpp>

#include "reduced.hpp"
#include "toy.hpp"

namespace qdnls::series {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
};

/// "%.17g"; round-trips every double.
std::string format_double(double x);

std::string to_csv(const Table& t);

/// Writes `path` and, when `meta` is not null, `path + ".json"`.
void write_table(const Table& t, const std::string& path, const nlohmann::json& meta = nullptr);

void write_json(const nlohmann::json& j, const std::string& path);

/// t,phi1,K,H,het_residual
Table reduced_table(const reduced::Trajectory& traj, double mu);

/// t, re/im of the four modes, K, inv1..inv4
Table toy_table(const toy::Trajectory& traj);

const std::vector<std::string>& pde_columns();

}  // namespace qdnls::series
