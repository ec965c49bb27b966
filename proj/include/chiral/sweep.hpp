#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "chiral/params.hpp"

namespace chiral {

/// Inclusive range of `steps` evenly spaced values; steps = 1 gives {lo}.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;

  std::vector<double> values() const;
};

/// One sweep axis over g, phi or N.
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

enum class OutputFormat { csv, json, both };

struct SweepSpec {
  ModelParams base;
  std::vector<SweepAxis> axes;  // at most two
  std::vector<std::string> tasks;
  std::filesystem::path output = "sweep_out";
  OutputFormat format = OutputFormat::csv;
};

/// Spec file: top-level `tasks = [...]`, optional `axes = [...]` ordering,
/// `output` and `format`; a [base] table of ModelParams keys; one
/// [axes.<name>] table per axis with either lo/hi/steps or `values`.
SweepSpec parse_sweep_spec(std::string_view text);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

using TaskValue = std::variant<double, std::vector<double>>;
using TaskFn = std::function<TaskValue(const ModelParams&)>;

/// Registered per-point computations by name.
const std::map<std::string, TaskFn>& task_registry();
std::vector<std::string> registered_tasks();

enum class CellStatus { ok, failed, skipped };

std::string_view to_string(CellStatus s);
CellStatus parse_cell_status(std::string_view text);

struct ResultCell {
  std::vector<double> coords;  // one value per axis
  CellStatus status = CellStatus::ok;
  /// NaN for tasks that failed or were skipped.
  std::map<std::string, TaskValue> values;
  std::string error;
  double wall_ms = 0.0;
};

struct ResultGrid {
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> axis_values;
  std::vector<std::string> tasks;
  std::vector<ResultCell> cells;  // row-major, first axis outermost
  ModelParams base;
};

/// Number of worker threads: CHIRALCHAIN_WORKERS if set, else the number of
/// logical cores.
unsigned sweep_workers();

/// Evaluates every cell once. Cells are split into contiguous blocks, one per
/// worker. A throwing task marks its cell failed; a cell whose parameters do
/// not validate is skipped. Throws std::invalid_argument on unknown tasks or
/// more than two axes.
ResultGrid run_sweep(const SweepSpec& spec, unsigned workers = 0);

/// CSV: header `<axes...>,status,<tasks...>`, one row per cell. Scalars use
/// %.17g; vectors are joined by ';' and always end in ';'. With no tasks only
/// the header is written.
void emit_csv(const ResultGrid& grid, std::ostream& out);
std::string emit_csv(const ResultGrid& grid);
ResultGrid parse_result_csv(std::string_view text);

/// JSON with a metadata block (base params, version, axes, generation time)
/// and one object per cell including its wall time.
std::string emit_json(const ResultGrid& grid);

/// Writes sweep.csv and/or sweep.json under `dir` (created if needed).
std::vector<std::filesystem::path> emit(const ResultGrid& grid, const std::filesystem::path& dir, OutputFormat format);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chiral
