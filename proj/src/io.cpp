#include "minkflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "minkflow/errors.hpp"
#include "minkflow/interp.hpp"

namespace minkflow {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw ConfigError("trailing characters in number '" + s + "'");
  return v;
}

}  // namespace

SupportFn read_body_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open body file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty body file");
  // tolerate optional whitespace and \r in the header
  std::string hdr;
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) hdr += c;
  if (hdr != "theta,h") throw ConfigError("body CSV must start with header 'theta,h'");
  std::vector<double> theta, h;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cols = split(line, ',');
    if (cols.size() != 2) throw ConfigError("body CSV row needs two columns");
    theta.push_back(to_double(cols[0]));
    h.push_back(to_double(cols[1]));
  }
  const int n = static_cast<int>(theta.size());
  if (n < 16) throw ConfigError("body CSV needs at least 16 rows");
  const double dth = kTwoPi / n;
  if (std::fabs(theta[0]) > 1e-9) throw ConfigError("body CSV must start at theta = 0");
  for (int i = 0; i < n; ++i) {
    if (i > 0 && !(theta[i] > theta[i - 1]))
      throw ConfigError("body CSV theta must be strictly increasing");
    if (std::fabs(theta[i] - i * dth) > 1e-6)
      throw ConfigError("body CSV theta must lie on the uniform grid");
  }
  return build_support_fn(h);
}

void write_body_csv(const std::string& path, const SupportFn& s) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write body file '" + path + "'");
  out << "theta,h\n";
  char buf[64];
  for (int i = 0; i < s.N; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", kTwoPi * i / s.N, s.h[i]);
    out << buf;
  }
}

void write_timeseries_csv(const std::string& path,
                          const std::vector<TimeSeriesRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write timeseries file '" + path + "'");
  out << "t,lambda,phi,Qtilde,residual,hmin,hmax,dt\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.lambda,
                  r.phi, r.qtilde, r.residual, r.hmin, r.hmax, r.dt);
    out << buf;
  }
}

void write_mesh_csv(const std::string& vertex_path, const std::string& tri_path,
                    const Mesh& mesh) {
  std::ofstream vout(vertex_path);
  if (!vout) throw ConfigError("cannot write '" + vertex_path + "'");
  vout << "x,y\n";
  char buf[96];
  for (const auto& p : mesh.v) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.x, p.y);
    vout << buf;
  }
  std::ofstream tout(tri_path);
  if (!tout) throw ConfigError("cannot write '" + tri_path + "'");
  tout << "a,b,c\n";
  for (const auto& t : mesh.tri) tout << t[0] << ',' << t[1] << ',' << t[2] << '\n';
}

std::vector<FourierTerm> parse_fourier_terms(const std::string& body) {
  std::vector<FourierTerm> terms;
  for (const auto& part : split(body, ';')) {
    auto nums = split(part, ',');
    if (nums.size() != 3)
      throw ConfigError("fourier term must be 'k,a,b', got '" + part + "'");
    FourierTerm t;
    t.k = static_cast<int>(to_double(nums[0]));
    t.a = to_double(nums[1]);
    t.b = to_double(nums[2]);
    terms.push_back(t);
  }
  return terms;
}

std::vector<double> parse_f_spec(const std::string& spec, int N) {
  const auto pos = spec.find(':');
  if (pos == std::string::npos)
    throw ConfigError("f spec must be const:, trig: or csv:, got '" + spec + "'");
  const std::string kind = spec.substr(0, pos);
  const std::string body = spec.substr(pos + 1);
  std::vector<double> f(N);
  if (kind == "const") {
    const double c = to_double(body);
    if (!(c > 0.0)) throw ConfigError("constant f must be positive");
    std::fill(f.begin(), f.end(), c);
    return f;
  }
  if (kind == "trig") {
    const auto terms = parse_fourier_terms(body);
    for (int i = 0; i < N; ++i) {
      const double t = kTwoPi * i / N;
      double acc = 0.0;
      for (const auto& term : terms)
        acc += term.k == 0 ? term.a
                           : term.a * std::cos(term.k * t) + term.b * std::sin(term.k * t);
      f[i] = acc;
    }
    for (double v : f)
      if (!(v > 0.0)) throw ConfigError("trig f must be pointwise positive");
    return f;
  }
  if (kind == "csv") {
    // table with header `theta,f`, resampled to the grid by cubic interpolation
    std::ifstream in(body);
    if (!in) throw ConfigError("cannot open f table '" + body + "'");
    std::string line;
    std::getline(in, line);
    std::vector<double> vals;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto cols = split(line, ',');
      if (cols.size() != 2) throw ConfigError("f table row needs two columns");
      vals.push_back(to_double(cols[1]));
    }
    if (static_cast<int>(vals.size()) < 16)
      throw ConfigError("f table needs at least 16 rows");
    for (int i = 0; i < N; ++i)
      f[i] = lagrange4_periodic(vals, kTwoPi, kTwoPi * i / N);
    for (double v : f)
      if (!(v > 0.0)) throw ConfigError("resampled f must be positive");
    return f;
  }
  throw ConfigError("unknown f spec kind '" + kind + "'");
}

SupportFn parse_init_spec(const std::string& spec, int N) {
  const auto pos = spec.find(':');
  if (pos == std::string::npos)
    throw ConfigError("init spec must be disk:, ellipse:, fourier: or csv:");
  const std::string kind = spec.substr(0, pos);
  const std::string body = spec.substr(pos + 1);
  if (kind == "disk") return support_disk(to_double(body), N);
  if (kind == "ellipse") {
    auto nums = split(body, ',');
    if (nums.size() != 2) throw ConfigError("ellipse spec is ellipse:a,b");
    return support_ellipse(to_double(nums[0]), to_double(nums[1]), N);
  }
  if (kind == "fourier") return support_from_fourier(parse_fourier_terms(body), N);
  if (kind == "csv") {
    SupportFn s = read_body_csv(body);
    if (s.N != N)
      throw ConfigError("body CSV grid (" + std::to_string(s.N) +
                        ") does not match configured N (" + std::to_string(N) + ")");
    return s;
  }
  throw ConfigError("unknown init spec kind '" + kind + "'");
}

}  // namespace minkflow
