#include <froth/profile.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <froth/errors.hpp>
#include <froth/io.hpp>

namespace froth {

namespace {

long checked_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const long n = std::lround(r);
  if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
    throw InvariantError(std::string(what) + " must be a positive integer");
  return n;
}

void check_range(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(std::abs(v[i]) <= 1.0))
      throw InvariantError(std::string(what) + " sample " + std::to_string(i) +
                           " outside [-1,1]");
}

}  // namespace

std::string to_string(BoundaryKind bc) {
  switch (bc) {
    case BoundaryKind::open: return "open";
    case BoundaryKind::periodic: return "periodic";
    case BoundaryKind::neumann: return "neumann";
    case BoundaryKind::plus: return "plus";
    case BoundaryKind::minus: return "minus";
    case BoundaryKind::custom: return "custom";
  }
  return "open";
}

BoundaryKind boundary_from_string(const std::string& token) {
  if (token == "open") return BoundaryKind::open;
  if (token == "periodic") return BoundaryKind::periodic;
  if (token == "neumann") return BoundaryKind::neumann;
  if (token == "plus") return BoundaryKind::plus;
  if (token == "minus") return BoundaryKind::minus;
  if (token == "custom") return BoundaryKind::custom;
  throw ParseError("unknown boundary condition '" + token + "'");
}

GridProfile::GridProfile(double L, double dx, std::vector<double> samples, BoundaryKind bc,
                         CustomBoundary out)
    : L_(L), dx_(dx), samples_(std::move(samples)), bc_(bc), custom_(std::move(out)) {
  if (!(dx_ > 0.0) || !(L_ > 0.0)) throw InvariantError("L and dx must be positive");
  checked_ratio(1.0, dx_, "1/dx");
  const long n = checked_ratio(L_, dx_, "L/dx");
  if (static_cast<std::size_t>(n) != samples_.size())
    throw InvariantError("sample count " + std::to_string(samples_.size()) +
                         " does not match L/dx = " + std::to_string(n));
  check_range(samples_, "profile");
  if (bc_ == BoundaryKind::custom) {
    check_range(custom_.left, "left boundary");
    check_range(custom_.right, "right boundary");
  } else {
    custom_ = {};
  }
}

GridProfile GridProfile::constant(double L, double dx, double value, BoundaryKind bc) {
  const long n = std::lround(L / dx);
  return GridProfile(L, dx, std::vector<double>(static_cast<std::size_t>(std::max(n, 0L)), value),
                     bc);
}

GridProfile GridProfile::from_function(double L, double dx, const std::function<double(double)>& f,
                                       BoundaryKind bc) {
  const long n = std::lround(L / dx);
  std::vector<double> s(static_cast<std::size_t>(std::max(n, 0L)));
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = f((static_cast<double>(i) + 0.5) * dx);
  return GridProfile(L, dx, std::move(s), bc);
}

std::size_t GridProfile::line_index(double pos) const {
  const double r = pos / dx_;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-7 || n < 0.0 || n > static_cast<double>(samples_.size()))
    throw AlignmentError("position " + format17(pos) + " is not a grid line");
  return static_cast<std::size_t>(n);
}

GridProfile GridProfile::with_samples(std::vector<double> s) const {
  return GridProfile(L_, dx_, std::move(s), bc_, custom_);
}

GridProfile GridProfile::with_bc(BoundaryKind bc, CustomBoundary out) const {
  return GridProfile(L_, dx_, samples_, bc, std::move(out));
}

StepProfile::StepProfile(std::vector<double> breakpoints, std::vector<double> values)
    : breaks_(std::move(breakpoints)), values_(std::move(values)) {
  if (breaks_.size() < 2 || values_.size() + 1 != breaks_.size())
    throw InvariantError("step profile needs n+1 breakpoints for n values");
  if (breaks_.front() != 0.0) throw InvariantError("first breakpoint must be 0");
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
    if (!(breaks_[i + 1] > breaks_[i]))
      throw InvariantError("breakpoints must be strictly increasing");
  check_range(values_, "step");
}

StepProfile StepProfile::from_grid(const GridProfile& g, bool merge_equal) {
  std::vector<double> br{0.0};
  std::vector<double> val;
  const auto& s = g.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (merge_equal && !val.empty() && val.back() == s[i]) {
      br.back() = static_cast<double>(i + 1) * g.dx();
      continue;
    }
    val.push_back(s[i]);
    br.push_back(static_cast<double>(i + 1) * g.dx());
  }
  br.back() = g.L();
  return StepProfile(std::move(br), std::move(val));
}

StepProfile StepProfile::alternating(double h, double L, double m) {
  if (!(h > 0.0) || !(L > 0.0)) throw DomainError("alternating profile needs h, L > 0");
  std::vector<double> br{0.0};
  std::vector<double> val;
  double sign = 1.0;
  for (long k = 1;; ++k) {
    const double next = static_cast<double>(k) * h;
    val.push_back(sign * m);
    if (next >= L * (1.0 - 1e-13)) {
      br.push_back(L);
      break;
    }
    br.push_back(next);
    sign = -sign;
  }
  return StepProfile(std::move(br), std::move(val));
}

bool StepProfile::in_K(double m_bar) const { return min_abs_value() >= m_bar; }

double StepProfile::min_abs_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, std::abs(v));
  return m;
}

double StepProfile::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * length(i);
  return s / L();
}

StepProfile StepProfile::negated() const {
  std::vector<double> v(values_);
  for (auto& x : v) x = -x;
  return StepProfile(breaks_, std::move(v));
}

GridProfile StepProfile::to_grid(double dx, BoundaryKind bc) const {
  const long n = std::lround(L() / dx);
  std::vector<double> s(static_cast<std::size_t>(std::max(n, 0L)));
  std::size_t piece = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = (static_cast<double>(i) + 0.5) * dx;
    while (piece + 1 < values_.size() && x >= breaks_[piece + 1]) ++piece;
    s[i] = values_[piece];
  }
  return GridProfile(L(), dx, std::move(s), bc);
}

std::vector<SignInterval> sign_intervals(const StepProfile& s, bool periodic) {
  std::vector<SignInterval> out;
  const auto& br = s.breakpoints();
  const auto& v = s.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) {
      // zero pieces carry no sign; attach them to the running interval
      if (!out.empty()) out.back().b = br[i + 1];
      continue;
    }
    const int sg = v[i] > 0.0 ? 1 : -1;
    if (!out.empty() && out.back().sign == sg) {
      out.back().b = br[i + 1];
    } else {
      if (out.empty() && i > 0) {
        out.push_back({0.0, br[i + 1], sg});
      } else {
        out.push_back({br[i], br[i + 1], sg});
      }
    }
  }
  if (periodic && out.size() > 1 && out.front().sign == out.back().sign) {
    // wrap: the last interval continues into the first one; keep it anchored
    // at the left end with its length extended past L
    SignInterval merged{out.back().a, out.front().b + s.L(), out.front().sign};
    out.erase(out.begin());
    out.back() = merged;
  }
  return out;
}

std::string to_string(BlockType t) {
  switch (t) {
    case BlockType::plus: return "+";
    case BlockType::minus: return "-";
    case BlockType::zero: return "0";
  }
  return "0";
}

BlockType block_type(double mean_value, double m_beta) {
  if (mean_value >= 0.9 * m_beta) return BlockType::plus;
  if (mean_value <= -0.9 * m_beta) return BlockType::minus;
  return BlockType::zero;
}

double average_over(const GridProfile& p, const Interval& I) {
  const std::size_t i0 = p.line_index(I.a);
  const std::size_t i1 = p.line_index(I.b);
  if (i1 <= i0) throw AlignmentError("empty averaging interval");
  double s = 0.0;
  for (std::size_t i = i0; i < i1; ++i) s += p[i];
  return s / static_cast<double>(i1 - i0);
}

std::string format_profile(const GridProfile& p,
                           const std::vector<std::pair<std::string, std::string>>& extras,
                           const std::string& comment) {
  std::ostringstream os;
  os << "# froth profile\n";
  if (!comment.empty()) os << "# " << comment << "\n";
  os << "L " << format17(p.L()) << "\n";
  os << "dx " << format17(p.dx()) << "\n";
  os << "bc " << to_string(p.bc()) << "\n";
  if (p.bc() == BoundaryKind::custom) {
    os << "out_left " << p.custom().left.size() << "\n";
    os << "out_right " << p.custom().right.size() << "\n";
  }
  for (const auto& [k, v] : extras) os << k << " " << v << "\n";
  for (double s : p.samples()) os << format17(s) << "\n";
  if (p.bc() == BoundaryKind::custom) {
    for (double s : p.custom().left) os << format17(s) << "\n";
    for (double s : p.custom().right) os << format17(s) << "\n";
  }
  return os.str();
}

void save_profile(const std::string& path, const GridProfile& p,
                  const std::vector<std::pair<std::string, std::string>>& extras,
                  const std::string& comment) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path + " for writing");
  f << format_profile(p, extras, comment);
}

ProfileFile parse_profile(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::optional<double> L, dx;
  std::optional<BoundaryKind> bc;
  std::size_t n_left = 0, n_right = 0;
  std::map<std::string, std::string> extras;
  std::vector<double> values;
  bool in_samples = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    const char c = tok[0];
    const bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
                         c == '.';
    if (numeric) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') throw ParseError("bad sample '" + tok + "'", lineno);
      std::string rest;
      if (ls >> rest) throw ParseError("one sample per line expected", lineno);
      values.push_back(v);
      in_samples = true;
      continue;
    }
    if (in_samples) throw ParseError("header line after samples", lineno);
    std::string val;
    std::getline(ls >> std::ws, val);
    while (!val.empty() && std::isspace(static_cast<unsigned char>(val.back()))) val.pop_back();
    if (val.empty()) throw ParseError("header '" + tok + "' without value", lineno);
    auto number = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0') throw ParseError("bad number '" + s + "'", lineno);
      return v;
    };
    if (tok == "L") {
      L = number(val);
    } else if (tok == "dx") {
      dx = number(val);
    } else if (tok == "bc") {
      try {
        bc = boundary_from_string(val);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), lineno);
      }
    } else if (tok == "out_left") {
      n_left = static_cast<std::size_t>(number(val));
    } else if (tok == "out_right") {
      n_right = static_cast<std::size_t>(number(val));
    } else {
      extras[tok] = val;
    }
  }
  if (!L || !dx || !bc) throw ParseError("missing header (need L, dx, bc)", lineno);
  if (values.empty()) throw ParseError("no samples", lineno);
  const double r = *L / *dx;
  const auto n = static_cast<std::size_t>(std::llround(r));
  const std::size_t expect = n + (*bc == BoundaryKind::custom ? n_left + n_right : 0);
  if (values.size() != expect)
    throw ParseError("expected " + std::to_string(expect) + " samples, found " +
                         std::to_string(values.size()),
                     lineno);
  CustomBoundary out;
  if (*bc == BoundaryKind::custom) {
    out.left.assign(values.begin() + static_cast<long>(n),
                    values.begin() + static_cast<long>(n + n_left));
    out.right.assign(values.begin() + static_cast<long>(n + n_left), values.end());
    values.resize(n);
  }
  return {GridProfile(*L, *dx, std::move(values), *bc, std::move(out)), std::move(extras)};
}

ProfileFile load_profile_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_profile(ss.str());
}

GridProfile load_profile(const std::string& path) { return load_profile_file(path).profile; }

}  // namespace froth
