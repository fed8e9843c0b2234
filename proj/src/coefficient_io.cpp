#include "cylcauchy/coefficient_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "cylcauchy/error.hpp"

namespace cylcauchy {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto c = line.find(',');
    out.push_back(trim(line.substr(0, c)));
    if (c == std::string_view::npos) break;
    line = line.substr(c + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorCode::FormatError,
                "line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v))
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": non-finite value");
  }
  return v;
}

}  // namespace

ModeCoefficients parse_coefficients(const std::string& text, std::shared_ptr<const OperatorSpectrum> spectrum,
                                    std::size_t K, std::size_t M) {
  struct Entry {
    std::size_t k, m;
    double value;
  };
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0, max_k = 0, max_m = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 3)
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": expected k,m,value");
    Entry e{parse_number<std::size_t>(fields[0], line_no), parse_number<std::size_t>(fields[1], line_no),
            parse_number<double>(fields[2], line_no)};
    if (e.k == 0 || e.m == 0)
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": indices start at 1");
    max_k = std::max(max_k, e.k);
    max_m = std::max(max_m, e.m);
    entries.push_back(e);
  }
  if (entries.empty()) throw Error(ErrorCode::FormatError, "coefficient file has no entries");
  if (K == 0) K = max_k;
  if (M == 0) M = max_m;
  ModeCoefficients coeffs(std::move(spectrum), K, M, Provenance::FileLoaded);
  for (const auto& e : entries)
    if (e.k <= K && e.m <= M) coeffs.set(e.k, e.m, e.value);
  return coeffs;
}

std::string format_coefficients(const ModeCoefficients& coeffs) {
  std::string out = "# k,m,value\n";
  for (std::size_t k = 1; k <= coeffs.K(); ++k)
    for (std::size_t m = 1; m <= coeffs.M(); ++m)
      out += std::to_string(k) + "," + std::to_string(m) + "," + format_double(coeffs(k, m)) + "\n";
  return out;
}

bool looks_like_grid(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    return line == "x,t,value";
  }
  return false;
}

GridSamples parse_grid(const std::string& text) {
  GridSamples grid;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool header = false;
  struct Row {
    double x, t, v;
  };
  std::vector<Row> rows;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto nx_pos = line.find("nx=");
      const auto nt_pos = line.find("nt=");
      if (nx_pos != std::string_view::npos && nt_pos != std::string_view::npos) {
        auto number_at = [&](std::size_t pos) {
          auto rest = line.substr(pos + 3);
          const auto end = rest.find_first_not_of("0123456789");
          return parse_number<std::size_t>(rest.substr(0, end), line_no);
        };
        grid.nx = number_at(nx_pos);
        grid.nt = number_at(nt_pos);
      }
      continue;
    }
    if (!header) {
      if (line != "x,t,value")
        throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": expected header x,t,value");
      header = true;
      continue;
    }
    const auto f = split_commas(line);
    if (f.size() != 3)
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": expected x,t,value");
    rows.push_back({parse_number<double>(f[0], line_no), parse_number<double>(f[1], line_no),
                    parse_number<double>(f[2], line_no)});
  }
  if (grid.nx < 2 || grid.nt < 2)
    throw Error(ErrorCode::FormatError, "missing '# nx=..,nt=..' grid comment");
  if (rows.size() != grid.nx * grid.nt)
    throw Error(ErrorCode::FormatError, "expected " + std::to_string(grid.nx * grid.nt) + " rows, got " +
                                            std::to_string(rows.size()));
  grid.values.resize(rows.size());
  for (std::size_t i = 0; i < grid.nx; ++i) {
    for (std::size_t j = 0; j < grid.nt; ++j) {
      const auto& r = rows[i * grid.nt + j];
      if (std::abs(r.x - grid.x(i)) > 1e-9 || std::abs(r.t - grid.t(j)) > 1e-9)
        throw Error(ErrorCode::FormatError, "row " + std::to_string(i * grid.nt + j + 1) +
                                                " is off the uniform grid");
      grid.values[i * grid.nt + j] = r.v;
    }
  }
  return grid;
}

std::string format_grid(const GridSamples& grid) {
  std::string out = "# nx=" + std::to_string(grid.nx) + ",nt=" + std::to_string(grid.nt) + "\nx,t,value\n";
  for (std::size_t i = 0; i < grid.nx; ++i)
    for (std::size_t j = 0; j < grid.nt; ++j)
      out += format_double(grid.x(i)) + "," + format_double(grid.t(j)) + "," +
             format_double(grid.values[i * grid.nt + j]) + "\n";
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FormatError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace cylcauchy
