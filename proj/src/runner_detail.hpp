#pragma once

#include <functional>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "catoptrica/types.hpp"

namespace catoptrica::cli::detail_runner {

using Cell = std::variant<double, int, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string to_csv(const Table& t);
std::string to_json(const Table& t, const std::string& command);

// Runs fn(0..n-1) on up to `threads` workers; output slots are indexed so the
// result is independent of scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct DiagRow {
  double u = 0.0, v = 0.0;
  std::string code, detail;
};

std::string diagnostics_csv(const std::vector<DiagRow>& diags);
void write_file(const std::string& path, const std::string& content);
std::string signs_text(SignCombo s);
std::vector<SignCombo> sweep_combos(bool all);

}  // namespace catoptrica::cli::detail_runner
