#include "cylcauchy/operator_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cylcauchy/error.hpp"

namespace cylcauchy {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::FormatError: return "format-error";
    case ErrorCode::FriedrichsViolation: return "friedrichs-violation";
    case ErrorCode::OrderingError: return "ordering-error";
    case ErrorCode::RangeError: return "range-error";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::UnderflowError: return "underflow-error";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::BudgetError: return "budget-error";
    case ErrorCode::OracleRangeError: return "oracle-range-error";
    case ErrorCode::ConvergenceError: return "convergence-error";
    case ErrorCode::TruncatedResult: return "truncated-result";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::ResolutionError: return "resolution-error";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::RefusedIllPosed: return "refused-ill-posed";
    case ErrorCode::AmplificationOverflow: return "amplification-overflow";
  }
  return "unknown";
}

OperatorSpectrum::OperatorSpectrum(std::vector<SpectrumEntry> entries, std::string domain_descriptor)
    : entries_(std::move(entries)), domain_(std::move(domain_descriptor)) {
  if (entries_.empty()) throw Error(ErrorCode::InvalidArgument, "spectrum has no entries");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.k != i + 1)
      throw Error(ErrorCode::OrderingError,
                  "index k=" + std::to_string(e.k) + " at position " + std::to_string(i + 1));
    if (!(e.mu >= 1.0) || !std::isfinite(e.mu))
      throw Error(ErrorCode::FriedrichsViolation,
                  "mu_" + std::to_string(e.k) + " = " + std::to_string(e.mu) + " < 1");
    if (i > 0 && e.mu < entries_[i - 1].mu)
      throw Error(ErrorCode::OrderingError, "mu decreases at k=" + std::to_string(e.k));
  }
}

double OperatorSpectrum::mu(std::size_t k) const {
  if (k == 0 || k > entries_.size())
    throw Error(ErrorCode::InvalidArgument, "k=" + std::to_string(k) + " outside spectrum");
  return entries_[k - 1].mu;
}

OperatorSpectrum dirichlet_spectrum_1d(std::size_t k_max) {
  if (k_max == 0) throw Error(ErrorCode::InvalidArgument, "k_max must be >= 1");
  std::vector<SpectrumEntry> entries;
  entries.reserve(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto kd = static_cast<double>(k);
    entries.push_back({k, kd * kd, {static_cast<int>(k)}});
  }
  return {std::move(entries), "dirichlet-1d"};
}

OperatorSpectrum tensor_spectrum(int dim, int k_max_per_dim, std::size_t count) {
  if (dim < 1 || k_max_per_dim < 1 || count == 0)
    throw Error(ErrorCode::InvalidArgument, "dim, k_max_per_dim and count must be positive");
  const double box = std::pow(static_cast<double>(k_max_per_dim), dim);
  if (static_cast<double>(count) > box)
    throw Error(ErrorCode::InvalidArgument, "count exceeds k_max_per_dim^dim enumeration box");

  struct Item {
    long long mu;
    std::vector<int> idx;
  };
  std::vector<Item> items;
  items.reserve(static_cast<std::size_t>(box));
  std::vector<int> idx(static_cast<std::size_t>(dim), 1);
  for (;;) {
    long long mu = 0;
    for (int v : idx) mu += static_cast<long long>(v) * v;
    items.push_back({mu, idx});
    int d = dim - 1;
    while (d >= 0 && idx[static_cast<std::size_t>(d)] == k_max_per_dim) {
      idx[static_cast<std::size_t>(d)] = 1;
      --d;
    }
    if (d < 0) break;
    ++idx[static_cast<std::size_t>(d)];
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.mu != b.mu ? a.mu < b.mu : a.idx < b.idx;
  });

  std::vector<SpectrumEntry> entries;
  entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    entries.push_back({i + 1, static_cast<double>(items[i].mu), std::move(items[i].idx)});
  const std::string descriptor =
      dim == 1 ? std::string("dirichlet-1d") : "dirichlet-tensor-" + std::to_string(dim) + "d";
  return {std::move(entries), descriptor};
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view s, std::size_t line_no) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw Error(ErrorCode::FormatError,
                "line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  return v;
}

std::size_t parse_index(std::string_view s, std::size_t line_no) {
  s = trim(s);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0)
    throw Error(ErrorCode::FormatError,
                "line " + std::to_string(line_no) + ": bad index '" + std::string(s) + "'");
  return v;
}

std::vector<int> parse_label(std::string_view s, std::size_t line_no) {
  std::string buf(trim(s));
  for (char& c : buf)
    if (c == ':' || c == '(' || c == ')') c = ' ';
  std::istringstream in(buf);
  std::vector<int> out;
  std::string tok;
  while (in >> tok) out.push_back(static_cast<int>(parse_index(tok, line_no)));
  return out;
}

}  // namespace

OperatorSpectrum parse_spectrum(const std::string& text) {
  std::vector<SpectrumEntry> entries;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto c1 = line.find(',');
    if (c1 == std::string_view::npos)
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": expected k,mu");
    const auto c2 = line.find(',', c1 + 1);
    SpectrumEntry e;
    e.k = parse_index(line.substr(0, c1), line_no);
    e.mu = parse_double(line.substr(c1 + 1, c2 == std::string_view::npos ? line.npos : c2 - c1 - 1),
                        line_no);
    if (c2 != std::string_view::npos) e.label = parse_label(line.substr(c2 + 1), line_no);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw Error(ErrorCode::FormatError, "spectrum file has no entries");
  return {std::move(entries), "external"};
}

OperatorSpectrum load_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FormatError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spectrum(ss.str());
}

double eval_basis_1d(std::size_t k, double x) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (!(x >= 0.0 && x <= std::numbers::pi))
    throw Error(ErrorCode::InvalidArgument, "x outside [0, pi]");
  return std::sqrt(2.0 / std::numbers::pi) * std::sin(static_cast<double>(k) * x);
}

}  // namespace cylcauchy
