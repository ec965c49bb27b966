#include "chiral/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "chiral/bdg_kspace.hpp"
#include "chiral/config.hpp"
#include "chiral/ed.hpp"
#include "chiral/lswt.hpp"
#include "chiral/quadratic.hpp"
#include "chiral/topology.hpp"

namespace chiral {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_value(const TaskValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  std::string out;
  for (double x : std::get<std::vector<double>>(v)) out += format_double(x) + ";";
  return out.empty() ? ";" : out;
}

double parse_number(std::string_view s) {
  const std::string str(s);
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (end != str.c_str() + str.size() || str.empty()) throw std::invalid_argument("bad number in CSV: " + str);
  return v;
}

TaskValue parse_value(std::string_view s) {
  if (s.find(';') == std::string_view::npos) return parse_number(s);
  std::vector<double> out;
  std::size_t start = 0;
  while (start < s.size()) {
    const auto end = s.find(';', start);
    const auto item = s.substr(start, end - start);
    if (!item.empty()) out.push_back(parse_number(item));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

void set_axis(ModelParams& p, const std::string& name, double v) {
  if (name == "g") {
    p.g = v;
  } else if (name == "phi") {
    p.phi = v;
  } else if (name == "N") {
    p.N = static_cast<int>(std::lround(v));
  } else {
    throw std::invalid_argument("unknown sweep axis: " + name);
  }
}

ModelParams open_chain(ModelParams p) {
  p.boundary = Boundary::open;
  return p;
}

CovarianceData covariance(const ModelParams& p) {
  return ground_covariance(build_realspace(open_chain(p)), {.allow_degenerate = true});
}

std::map<std::string, TaskFn> make_registry() {
  std::map<std::string, TaskFn> r;
  r["z2_invariant"] = [](const ModelParams& p) -> TaskValue { return static_cast<double>(z2_invariant(p)); };
  r["min_gap"] = [](const ModelParams& p) -> TaskValue { return gap_scan(p).min_gap; };
  r["critical_coupling"] = [](const ModelParams& p) -> TaskValue {
    const auto c = critical_coupling(p.omega0, p.Omega0, p.J, p.phi);
    return c ? c->g : kNaN;
  };
  r["bands_k0_kpi"] = [](const ModelParams& p) -> TaskValue {
    std::vector<double> out;
    for (double k : {0.0, kPi}) {
      const auto e = bloch_eigenvalues(build_bloch(p, k).entries);
      out.insert(out.end(), e.begin(), e.end());
    }
    return out;
  };
  r["zero_mode_energy"] = [](const ModelParams& p) -> TaskValue { return zero_modes(p, p.N).E_min; };
  r["edge_weight"] = [](const ModelParams& p) -> TaskValue { return zero_modes(p, p.N).edge_weight; };
  r["bdg_spectrum"] = [](const ModelParams& p) -> TaskValue {
    const auto s = bdg_spectrum(build_realspace(open_chain(p)));
    return std::vector<double>(s.energies.data(), s.energies.data() + s.energies.size());
  };
  r["ground_energy_ff"] = [](const ModelParams& p) -> TaskValue {
    return ground_energy(build_realspace(open_chain(p))) / p.N;
  };
  r["schmidt_gap"] = [](const ModelParams& p) -> TaskValue {
    return entanglement_ff(covariance(p), p.N / 2).schmidt_gap;
  };
  r["entropy"] = [](const ModelParams& p) -> TaskValue { return entanglement_ff(covariance(p), p.N / 2).entropy; };
  r["entanglement_spectrum"] = [](const ModelParams& p) -> TaskValue {
    return entanglement_ff(covariance(p), p.N / 2, 8).rdm_spectrum;
  };
  r["chirality_ff"] = [](const ModelParams& p) -> TaskValue {
    const auto cov = covariance(p);
    const int bond = p.N / 2 - 1;
    return std::vector<double>{chirality_ff(cov, Chain::A, bond), chirality_ff(cov, Chain::B, bond)};
  };
  r["order_parameter"] = [](const ModelParams& p) -> TaskValue { return order_parameter_ff(p, p.N); };
  r["ed_gaps"] = [](const ModelParams& p) -> TaskValue {
    const auto g = gaps(p, p.N);
    return std::vector<double>{g.delta0, g.delta1};
  };
  r["ed_ground_energy"] = [](const ModelParams& p) -> TaskValue {
    return ground_state_energy(sector_spectra(p, p.N, 1, false)) / p.N;
  };
  r["lswt_threshold"] = [](const ModelParams& p) -> TaskValue { return instability_threshold(p, p.phi).g; };
  return r;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto end = line.find(',', start);
    out.push_back(line.substr(start, end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::vector<double> axis_from_toml(const std::map<std::string, TomlValue>& table, const std::string& name) {
  auto number = [&](const char* key) {
    const auto it = table.find(key);
    if (it == table.end()) throw std::invalid_argument("axis " + name + " lacks '" + key + "'");
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    throw std::invalid_argument("axis " + name + ": '" + key + "' must be a number");
  };
  if (const auto it = table.find("values"); it != table.end()) {
    const auto* arr = std::get_if<std::vector<TomlScalar>>(&it->second);
    if (!arr) throw std::invalid_argument("axis " + name + ": values must be an array");
    std::vector<double> out;
    for (const auto& s : *arr) {
      const auto* d = std::get_if<double>(&s);
      if (!d) throw std::invalid_argument("axis " + name + ": values must be numbers");
      out.push_back(*d);
    }
    if (out.empty()) throw std::invalid_argument("axis " + name + ": empty value list");
    return out;
  }
  Range r{number("lo"), number("hi"), static_cast<int>(number("steps"))};
  return r.values();
}

}  // namespace

std::vector<double> Range::values() const {
  if (steps < 1) throw std::invalid_argument("range needs steps >= 1");
  if (lo > hi) throw std::invalid_argument("range needs lo <= hi");
  std::vector<double> out;
  if (steps == 1) return {lo};
  for (int i = 0; i < steps; ++i) out.push_back(i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1));
  return out;
}

SweepSpec parse_sweep_spec(std::string_view text) {
  const TomlDocument doc = parse_toml(text);
  SweepSpec spec;
  const auto top_it = doc.find("");
  const std::map<std::string, TomlValue> empty;
  const auto& top = top_it == doc.end() ? empty : top_it->second;

  auto string_list = [&](const std::string& key) {
    std::vector<std::string> out;
    const auto it = top.find(key);
    if (it == top.end()) return out;
    const auto* arr = std::get_if<std::vector<TomlScalar>>(&it->second);
    if (!arr) throw std::invalid_argument("'" + key + "' must be an array of strings");
    for (const auto& s : *arr) {
      const auto* str = std::get_if<std::string>(&s);
      if (!str) throw std::invalid_argument("'" + key + "' must be an array of strings");
      out.push_back(*str);
    }
    return out;
  };
  spec.tasks = string_list("tasks");
  for (const auto& t : spec.tasks) {
    if (!task_registry().count(t)) throw std::invalid_argument("unknown task: " + t);
  }
  if (const auto it = top.find("output"); it != top.end()) {
    const auto* s = std::get_if<std::string>(&it->second);
    if (!s) throw std::invalid_argument("'output' must be a string");
    spec.output = *s;
  }
  if (const auto it = top.find("format"); it != top.end()) {
    const auto* s = std::get_if<std::string>(&it->second);
    if (!s) throw std::invalid_argument("'format' must be a string");
    if (*s == "csv") {
      spec.format = OutputFormat::csv;
    } else if (*s == "json") {
      spec.format = OutputFormat::json;
    } else if (*s == "both") {
      spec.format = OutputFormat::both;
    } else {
      throw std::invalid_argument("unknown output format: " + *s);
    }
  }
  if (const auto it = doc.find("base"); it != doc.end()) {
    for (const auto& [key, value] : it->second) {
      if (const auto* d = std::get_if<double>(&value)) {
        set_param(spec.base, key, format_double(*d));
      } else if (const auto* s = std::get_if<std::string>(&value)) {
        set_param(spec.base, key, *s);
      } else {
        throw std::invalid_argument("base." + key + " must be a scalar");
      }
    }
  }
  std::vector<std::string> order = string_list("axes");
  if (order.empty()) {
    for (const auto& [section, table] : doc) {
      if (section.rfind("axes.", 0) == 0) order.push_back(section.substr(5));
    }
  }
  for (const auto& name : order) {
    const auto it = doc.find("axes." + name);
    if (it == doc.end()) throw std::invalid_argument("missing [axes." + name + "] table");
    if (name != "g" && name != "phi" && name != "N") throw std::invalid_argument("unknown sweep axis: " + name);
    spec.axes.push_back({name, axis_from_toml(it->second, name)});
  }
  if (spec.axes.size() > 2) throw std::invalid_argument("at most two sweep axes");
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep spec " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sweep_spec(buf.str());
}

const std::map<std::string, TaskFn>& task_registry() {
  static const std::map<std::string, TaskFn> registry = make_registry();
  return registry;
}

std::vector<std::string> registered_tasks() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : task_registry()) out.push_back(name);
  return out;
}

std::string_view to_string(CellStatus s) {
  switch (s) {
    case CellStatus::ok:
      return "ok";
    case CellStatus::failed:
      return "failed";
    case CellStatus::skipped:
      return "skipped";
  }
  return "failed";
}

CellStatus parse_cell_status(std::string_view text) {
  if (text == "ok") return CellStatus::ok;
  if (text == "failed") return CellStatus::failed;
  if (text == "skipped") return CellStatus::skipped;
  throw std::invalid_argument("unknown cell status: " + std::string(text));
}

unsigned sweep_workers() {
  if (const char* env = std::getenv("CHIRALCHAIN_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ResultGrid run_sweep(const SweepSpec& spec, unsigned workers) {
  if (spec.axes.size() > 2) throw std::invalid_argument("at most two sweep axes");
  for (const auto& t : spec.tasks) {
    if (!task_registry().count(t)) throw std::invalid_argument("unknown task: " + t);
  }
  ResultGrid grid;
  grid.base = spec.base;
  grid.tasks = spec.tasks;
  std::size_t total = 1;
  for (const auto& a : spec.axes) {
    grid.axis_names.push_back(a.name);
    grid.axis_values.push_back(a.values);
    total *= a.values.size();
  }
  grid.cells.resize(total);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    auto& cell = grid.cells[c];
    cell.coords.resize(spec.axes.size());
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const auto& vals = spec.axes[a].values;
      cell.coords[a] = vals[rest % vals.size()];
      rest /= vals.size();
    }
  }

  auto evaluate = [&](ResultCell& cell) {
    const auto t0 = std::chrono::steady_clock::now();
    ModelParams p = spec.base;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) set_axis(p, spec.axes[a].name, cell.coords[a]);
    for (const auto& t : spec.tasks) cell.values[t] = kNaN;
    try {
      p = validate(p).params;
    } catch (const std::exception& e) {
      cell.status = CellStatus::skipped;
      cell.error = e.what();
      return;
    }
    for (const auto& t : spec.tasks) {
      try {
        cell.values[t] = task_registry().at(t)(p);
      } catch (const std::exception& e) {
        cell.status = CellStatus::failed;
        if (!cell.error.empty()) cell.error += "; ";
        cell.error += t + ": " + e.what();
      }
    }
    cell.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  if (workers == 0) workers = sweep_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    for (auto& cell : grid.cells) evaluate(cell);
  } else {
    std::vector<std::thread> pool;
    const std::size_t block = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = w * block, hi = std::min(total, lo + block);
      pool.emplace_back([&, lo, hi] {
        for (std::size_t c = lo; c < hi; ++c) evaluate(grid.cells[c]);
      });
    }
    for (auto& t : pool) t.join();
  }
  return grid;
}

void emit_csv(const ResultGrid& grid, std::ostream& out) {
  std::string header;
  for (const auto& a : grid.axis_names) header += a + ",";
  header += "status";
  for (const auto& t : grid.tasks) header += "," + t;
  out << header << '\n';
  if (grid.tasks.empty()) return;
  for (const auto& cell : grid.cells) {
    for (double c : cell.coords) out << format_double(c) << ',';
    out << to_string(cell.status);
    for (const auto& t : grid.tasks) {
      const auto it = cell.values.find(t);
      out << ',' << (it == cell.values.end() ? format_double(kNaN) : format_value(it->second));
    }
    out << '\n';
  }
}

std::string emit_csv(const ResultGrid& grid) {
  std::ostringstream out;
  emit_csv(grid, out);
  return out.str();
}

ResultGrid parse_result_csv(std::string_view text) {
  ResultGrid grid;
  std::size_t pos = 0;
  bool header = true;
  std::size_t n_axes = 0;
  std::vector<std::set<double>> seen;
  std::vector<std::vector<double>> axis_order;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (header) {
      header = false;
      const auto status = std::find(fields.begin(), fields.end(), "status");
      if (status == fields.end()) throw std::invalid_argument("result CSV header lacks a status column");
      n_axes = static_cast<std::size_t>(status - fields.begin());
      for (std::size_t i = 0; i < n_axes; ++i) grid.axis_names.emplace_back(fields[i]);
      for (auto it = status + 1; it != fields.end(); ++it) grid.tasks.emplace_back(*it);
      seen.resize(n_axes);
      axis_order.resize(n_axes);
      continue;
    }
    if (fields.size() != n_axes + 1 + grid.tasks.size()) throw std::invalid_argument("result CSV row has wrong width");
    ResultCell cell;
    for (std::size_t i = 0; i < n_axes; ++i) {
      const double v = parse_number(fields[i]);
      cell.coords.push_back(v);
      if (seen[i].insert(v).second) axis_order[i].push_back(v);
    }
    cell.status = parse_cell_status(fields[n_axes]);
    for (std::size_t t = 0; t < grid.tasks.size(); ++t) cell.values[grid.tasks[t]] = parse_value(fields[n_axes + 1 + t]);
    grid.cells.push_back(std::move(cell));
  }
  if (header) throw std::invalid_argument("empty result CSV");
  grid.axis_values = axis_order;
  return grid;
}

std::string emit_json(const ResultGrid& grid) {
  using nlohmann::json;
  json meta;
  const ModelParams& b = grid.base;
  meta["params"] = {{"omega0", b.omega0}, {"Omega0", b.Omega0}, {"J", b.J},     {"g", b.g},
                    {"phi", b.phi},       {"N", b.N},           {"boundary", std::string(to_string(b.boundary))}};
  meta["version"] = kVersion;
  json axes = json::array();
  for (std::size_t a = 0; a < grid.axis_names.size(); ++a) {
    axes.push_back({{"name", grid.axis_names[a]}, {"values", grid.axis_values[a]}});
  }
  meta["axes"] = axes;
  meta["tasks"] = grid.tasks;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["generated_at"] = stamp;

  json cells = json::array();
  for (const auto& cell : grid.cells) {
    json c;
    for (std::size_t a = 0; a < grid.axis_names.size(); ++a) c[grid.axis_names[a]] = cell.coords[a];
    c["status"] = std::string(to_string(cell.status));
    c["wall_ms"] = cell.wall_ms;
    if (!cell.error.empty()) c["error"] = cell.error;
    json results = json::object();
    for (const auto& [name, v] : cell.values) {
      if (const auto* d = std::get_if<double>(&v)) {
        results[name] = std::isfinite(*d) ? json(*d) : json(nullptr);
      } else {
        results[name] = std::get<std::vector<double>>(v);
      }
    }
    c["results"] = results;
    cells.push_back(c);
  }
  return json{{"metadata", meta}, {"cells", cells}}.dump(2);
}

std::vector<std::filesystem::path> emit(const ResultGrid& grid, const std::filesystem::path& dir, OutputFormat format) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    if (!out) throw std::runtime_error("failed writing " + path.string());
    written.push_back(path);
  };
  if (format != OutputFormat::json) write(dir / "sweep.csv", emit_csv(grid));
  if (format != OutputFormat::csv) write(dir / "sweep.json", emit_json(grid));
  return written;
}

}  // namespace chiral
