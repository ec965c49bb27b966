#include "chiral/config.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace chiral {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view text) {
  text = trim(text);
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

TomlScalar parse_toml_scalar(std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    return std::string(text.substr(1, text.size() - 2));
  }
  return parse_double(text);
}

}  // namespace

void set_param(ModelParams& params, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "omega0") {
    params.omega0 = parse_double(value);
  } else if (key == "Omega0") {
    params.Omega0 = parse_double(value);
  } else if (key == "J") {
    params.J = parse_double(value);
  } else if (key == "g") {
    params.g = parse_double(value);
  } else if (key == "phi") {
    params.phi = parse_double(value);
  } else if (key == "N") {
    params.N = parse_int(value);
  } else if (key == "boundary") {
    params.boundary = parse_boundary(value);
  } else {
    throw std::invalid_argument("unknown parameter key: " + std::string(key));
  }
}

ModelParams parse_config(std::string_view text, ModelParams base) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(strip_comment(text.substr(pos, end - pos)));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    set_param(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ModelParams load_config(const std::filesystem::path& path, ModelParams base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), base);
}

std::string to_config_string(const ModelParams& p) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "omega0 = " << p.omega0 << '\n'
      << "Omega0 = " << p.Omega0 << '\n'
      << "J = " << p.J << '\n'
      << "g = " << p.g << '\n'
      << "phi = " << p.phi << '\n'
      << "N = " << p.N << '\n'
      << "boundary = " << to_string(p.boundary) << '\n';
  return out.str();
}

TomlDocument parse_toml(std::string_view text) {
  TomlDocument doc;
  std::string section;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(strip_comment(text.substr(pos, end - pos)));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = std::string(trim(line.substr(1, line.size() - 2)));
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("toml line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim(line.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    auto value = trim(line.substr(eq + 1));
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') {
        throw std::invalid_argument("toml line " + std::to_string(line_no) + ": unterminated array");
      }
      std::vector<TomlScalar> items;
      auto body = value.substr(1, value.size() - 2);
      std::size_t start = 0;
      bool in_string = false;
      for (std::size_t i = 0; i <= body.size(); ++i) {
        if (i < body.size() && body[i] == '"') in_string = !in_string;
        if (i == body.size() || (body[i] == ',' && !in_string)) {
          auto item = trim(body.substr(start, i - start));
          if (!item.empty()) items.push_back(parse_toml_scalar(item));
          start = i + 1;
        }
      }
      doc[section][std::string(key)] = std::move(items);
    } else {
      auto scalar = parse_toml_scalar(value);
      if (auto* d = std::get_if<double>(&scalar)) {
        doc[section][std::string(key)] = *d;
      } else {
        doc[section][std::string(key)] = std::get<std::string>(scalar);
      }
    }
  }
  return doc;
}

}  // namespace chiral
