#include "polya/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "polya/ensembles.hpp"
#include "polya/haarmc.hpp"
#include "polya/parallel.hpp"
#include "polya/pff.hpp"
#include "polya/transforms.hpp"

namespace polya::cli {

namespace {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Flag name -> JSON key. Every flag is also accepted as a key of --config.
const std::vector<std::pair<std::string, std::string>> kValueFlags = {
    {"--space", "space"},     {"--n", "n"},           {"--nu", "nu"},
    {"--weight", "weight"},   {"--weight2", "weight2"}, {"--weights", "weights"},
    {"--points", "points"},   {"--grid", "grid"},     {"--s", "s"},
    {"--s-imag", "s_imag"},   {"--kind", "kind"},     {"--seed", "seed"},
    {"--samples", "samples"}, {"--trials", "trials"}, {"--order", "order"},
    {"--range", "range"},     {"--a", "a"},           {"--x", "x"},
    {"--y", "y"},             {"--family", "family"}, {"--family2", "family2"},
    {"--threshold", "threshold"}, {"--output", "output"}};
const std::vector<std::pair<std::string, std::string>> kBoolFlags = {
    {"--strict", "strict"}, {"--multivariate", "multivariate"}};

const std::vector<std::string> kCommands = {"density", "normalize", "transform", "convolve",
                                            "pff-check", "verify", "simulate"};

bool has(const json& j, const std::string& key) { return j.contains(key) && !j[key].is_null(); }

std::string get_string(const json& j, const std::string& key) {
  if (!has(j, key)) throw ConfigError("missing '" + key + "'");
  if (!j[key].is_string()) throw ConfigError("'" + key + "' must be a string");
  return j[key].get<std::string>();
}

double to_double(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': cannot parse '" + text + "' as a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw ConfigError("'" + key + "': cannot parse '" + text + "' as a number");
  return v;
}

double get_double(const json& j, const std::string& key, std::optional<double> fallback = std::nullopt) {
  if (!has(j, key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing '" + key + "'");
  }
  if (j[key].is_number()) return j[key].get<double>();
  if (j[key].is_string()) return to_double(j[key].get<std::string>(), key);
  throw ConfigError("'" + key + "' must be a number");
}

long get_long(const json& j, const std::string& key, std::optional<long> fallback = std::nullopt) {
  const double v = get_double(j, key, fallback ? std::optional<double>(static_cast<double>(*fallback)) : std::nullopt);
  if (std::floor(v) != v || std::abs(v) > 9e15) throw ConfigError("'" + key + "' must be an integer");
  return static_cast<long>(v);
}

std::uint64_t get_seed(const json& j) {
  if (!has(j, "seed")) throw ConfigError("--seed is required for stochastic commands");
  if (j["seed"].is_number_unsigned()) return j["seed"].get<std::uint64_t>();
  const std::string text = j["seed"].is_string() ? j["seed"].get<std::string>() : j["seed"].dump();
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw ConfigError("'seed' must be a non-negative integer");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

std::vector<double> get_list(const json& j, const std::string& key) {
  if (!has(j, key)) throw ConfigError("missing '" + key + "'");
  std::vector<double> out;
  if (j[key].is_array()) {
    for (const auto& v : j[key]) {
      if (!v.is_number()) throw ConfigError("'" + key + "' must hold numbers");
      out.push_back(v.get<double>());
    }
  } else if (j[key].is_string()) {
    for (const auto& p : split(j[key].get<std::string>(), ',')) out.push_back(to_double(p, key));
  } else if (j[key].is_number()) {
    out.push_back(j[key].get<double>());
  } else {
    throw ConfigError("'" + key + "' must be a list");
  }
  if (out.empty()) throw ConfigError("'" + key + "' is empty");
  return out;
}

// "1,2;3,4" or [[1,2],[3,4]] or [1,2] (a single point).
std::vector<std::vector<double>> get_points(const json& j, const std::string& key) {
  std::vector<std::vector<double>> out;
  const json& v = j[key];
  if (v.is_string()) {
    for (const auto& p : split(v.get<std::string>(), ';')) {
      json tmp = {{key, p}};
      out.push_back(get_list(tmp, key));
    }
  } else if (v.is_array() && !v.empty() && v[0].is_array()) {
    for (const auto& p : v) {
      json tmp = {{key, p}};
      out.push_back(get_list(tmp, key));
    }
  } else {
    out.push_back(get_list(j, key));
  }
  return out;
}

// "lo:hi:count" or {"lo":..,"hi":..,"count":..}.
std::vector<double> get_grid(const json& j) {
  double lo, hi;
  long count;
  if (j["grid"].is_object()) {
    lo = get_double(j["grid"], "lo");
    hi = get_double(j["grid"], "hi");
    count = get_long(j["grid"], "count");
  } else {
    const auto parts = split(get_string(j, "grid"), ':');
    if (parts.size() != 3) throw ConfigError("grid must be lo:hi:count");
    lo = to_double(parts[0], "grid");
    hi = to_double(parts[1], "grid");
    count = static_cast<long>(to_double(parts[2], "grid"));
  }
  if (count < 1 || count > 10000000) throw ConfigError("grid count out of range");
  if (!(hi >= lo)) throw ConfigError("grid needs hi >= lo");
  std::vector<double> xs;
  for (long i = 0; i < count; ++i) xs.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return xs;
}

MatrixSpace get_space(const json& j) {
  const std::string name = has(j, "space") ? get_string(j, "space") : "H2";
  const long n = get_long(j, "n", 1);
  if (n < 1 || n > 64) throw ConfigError("n must be in [1, 64]");
  try {
    return MatrixSpace::parse(name, static_cast<int>(n), get_double(j, "nu", 0.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += format_number(v[i]);
  }
  return s;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

void write_csv(std::ostream& os, const Csv& csv, std::uint64_t hash, const std::optional<std::uint64_t>& seed) {
  std::ostringstream h;
  h << std::hex << std::setw(16) << std::setfill('0') << hash;
  os << "# config_hash=" << h.str() << ", seed=" << (seed ? std::to_string(*seed) : std::string("none")) << '\n';
  for (std::size_t i = 0; i < csv.header.size(); ++i) os << (i ? "," : "") << csv.header[i];
  os << '\n';
  for (const auto& row : csv.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

struct Outcome {
  Csv csv;
  bool verified = true;
  std::optional<std::uint64_t> seed;
};

Ensemble build_ensemble(const json& j, const MatrixSpace& space) {
  if (has(j, "weights")) {
    WeightVector ws;
    const json& v = j["weights"];
    std::vector<std::string> specs;
    if (v.is_array()) {
      for (const auto& e : v) specs.push_back(e.get<std::string>());
    } else {
      specs = split(get_string(j, "weights"), ';');
    }
    if (static_cast<int>(specs.size()) != space.n())
      throw ConfigError("'weights' must list exactly n weights separated by ';'");
    for (const auto& s : specs) ws.push_back(parse_weight(s, space));
    return Ensemble::polynomial(space, std::move(ws));
  }
  return Ensemble::polya(space, parse_weight(get_string(j, "weight"), space));
}

Outcome cmd_density(const json& j) {
  const MatrixSpace space = get_space(j);
  const Ensemble e = build_ensemble(j, space);
  Outcome o;
  if (has(j, "points")) {
    for (int c = 1; c <= space.n(); ++c) o.csv.header.push_back("a" + std::to_string(c));
    o.csv.header.push_back("density");
    o.csv.header.push_back("positivity_violation");
    for (const auto& p : get_points(j, "points")) {
      if (static_cast<int>(p.size()) != space.n()) throw ConfigError("each point needs n coordinates");
      const SpectralPoint a(p);
      const DensityValue d = joint_density_checked(e, a);
      std::vector<std::string> row;
      for (double v : a.values()) row.push_back(format_number(v));
      row.push_back(format_number(d.value));
      row.push_back(bool_text(d.positivity_violation));
      o.csv.rows.push_back(std::move(row));
    }
  } else if (has(j, "grid")) {
    o.csv.header = {"x", "marginal_density"};
    const auto rho = marginal_density(e);
    for (double x : get_grid(j)) o.csv.rows.push_back({format_number(x), format_number(rho(x))});
  } else {
    throw ConfigError("density needs --points or --grid");
  }
  return o;
}

Outcome cmd_normalize(const json& j) {
  const MatrixSpace space = get_space(j);
  Outcome o;
  o.csv.header = {"space", "n", "norm"};
  double norm;
  if (has(j, "weights")) {
    norm = build_ensemble(j, space).norm();
  } else {
    norm = normalize(space, parse_weight(get_string(j, "weight"), space));
  }
  o.csv.rows.push_back({space.name(), std::to_string(space.n()), format_number(norm)});
  return o;
}

TransformKind get_transform_kind(const json& j, const MatrixSpace& space) {
  if (!has(j, "kind")) return TransformKind::for_space(space);
  const std::string k = get_string(j, "kind");
  if (k == "fourier") return TransformKind::fourier();
  if (k == "mellin") return TransformKind::mellin();
  if (k == "hankel") return TransformKind::hankel(get_double(j, "nu", 0.0));
  throw ConfigError("kind must be fourier, hankel or mellin");
}

std::vector<Complex> get_complex_list(const json& j) {
  const auto re = get_list(j, "s");
  std::vector<double> im(re.size(), 0.0);
  if (has(j, "s_imag")) {
    im = get_list(j, "s_imag");
    if (im.size() != re.size()) throw ConfigError("s and s_imag need equal lengths");
  }
  std::vector<Complex> out;
  for (std::size_t i = 0; i < re.size(); ++i) out.emplace_back(re[i], im[i]);
  return out;
}

Outcome cmd_transform(const json& j) {
  const MatrixSpace space = get_space(j);
  const auto s = get_complex_list(j);
  Outcome o;
  const bool mv = has(j, "multivariate") && j["multivariate"].get<bool>();
  if (mv) {
    if (static_cast<int>(s.size()) != space.n()) throw ConfigError("multivariate transform needs n values of s");
    Complex v;
    if (has(j, "weights")) {
      const Ensemble e = build_ensemble(j, space);
      v = mv_transform_polynomial(space, e.weights(), s, e.norm());
    } else {
      v = mv_transform_polya(space, parse_weight(get_string(j, "weight"), space), s);
    }
    for (int c = 1; c <= space.n(); ++c) {
      o.csv.header.push_back("s" + std::to_string(c) + "_re");
      o.csv.header.push_back("s" + std::to_string(c) + "_im");
    }
    o.csv.header.push_back("value_re");
    o.csv.header.push_back("value_im");
    std::vector<std::string> row;
    for (const Complex& z : s) {
      row.push_back(format_number(z.real()));
      row.push_back(format_number(z.imag()));
    }
    row.push_back(format_number(v.real()));
    row.push_back(format_number(v.imag()));
    o.csv.rows.push_back(std::move(row));
    return o;
  }
  const TransformKind kind = get_transform_kind(j, space);
  const Weight w = parse_weight(get_string(j, "weight"), space);
  o.csv.header = {"s_re", "s_im", "value_re", "value_im"};
  for (const Complex& z : s) {
    const Complex v = univariate_transform(kind, w, z);
    o.csv.rows.push_back({format_number(z.real()), format_number(z.imag()), format_number(v.real()),
                          format_number(v.imag())});
  }
  return o;
}

Outcome cmd_convolve(const json& j) {
  const MatrixSpace space = get_space(j);
  const Weight w1 = parse_weight(get_string(j, "weight"), space);
  const Weight w2 = parse_weight(get_string(j, "weight2"), space);
  const Weight w = convolve_polya(space, w1, w2);
  Outcome o;
  o.csv.header = {"x", "value"};
  for (double x : get_grid(j)) o.csv.rows.push_back({format_number(x), format_number(w(x))});
  return o;
}

Outcome cmd_pff(const json& j) {
  const MatrixSpace space = get_space(j);
  const Weight f = parse_weight(get_string(j, "weight"), space);
  GridSampler g;
  g.seed = get_seed(j);
  g.trials = get_long(j, "trials", 10000);
  if (g.trials < 1) throw ConfigError("trials must be positive");
  g.range = get_double(j, "range", 0.0);
  g.strict_integrability = has(j, "strict") && j["strict"].get<bool>();
  const long order = get_long(j, "order", 2);
  if (order < 1 || order > 12) throw ConfigError("order must be in [1, 12]");
  const PffVerdict v = pff_order_check(f, static_cast<int>(order), g);
  Outcome o;
  o.seed = g.seed;
  o.verified = v.is_pff;
  o.csv.header = {"is_pff", "order_tested", "grids_tested", "determinant", "product", "xs", "ys"};
  std::vector<std::string> row = {bool_text(v.is_pff), std::to_string(v.order_tested),
                                  std::to_string(v.grids_tested)};
  if (v.witness) {
    row.push_back(format_number(v.witness->determinant));
    row.push_back(format_number(v.witness->product));
    row.push_back(join_numbers(v.witness->xs));
    row.push_back(join_numbers(v.witness->ys));
  } else {
    row.insert(row.end(), {"", "", "", ""});
  }
  o.csv.rows.push_back(std::move(row));
  return o;
}

void mc_row(Outcome& o, const McReport& r, Complex exact) {
  const double dev = std::abs(r.estimate - exact);
  const double sigmas = r.std_error > 0.0 ? dev / r.std_error : (dev <= 1e-10 ? 0.0 : INFINITY);
  o.verified = sigmas <= 5.0;
  o.csv.header = {"estimate_re", "estimate_im", "exact_re", "exact_im", "std_error", "deviation_sigmas", "samples",
                  "pass"};
  o.csv.rows.push_back({format_number(r.estimate.real()), format_number(r.estimate.imag()),
                        format_number(exact.real()), format_number(exact.imag()), format_number(r.std_error),
                        format_number(sigmas), std::to_string(r.n_samples), bool_text(o.verified)});
}

Outcome cmd_verify(const std::string& suite, const json& j) {
  Outcome o;
  o.seed = get_seed(j);
  const long samples = get_long(j, "samples", 100000);
  if (samples < 1000) throw ConfigError("samples must be at least 1000");
  if (suite == "hciz" || suite == "gn" || suite == "bk") {
    const auto a = get_list(j, "a");
    const auto s = get_list(j, "s");
    if (a.size() != s.size()) throw ConfigError("a and s need equal lengths");
    if (has(j, "n") && get_long(j, "n") != static_cast<long>(a.size()))
      throw ConfigError("n does not match the length of a");
    IntegralKind kind;
    if (suite == "hciz") kind.kind = IntegralKind::hciz;
    if (suite == "gn") kind.kind = IntegralKind::gn;
    if (suite == "bk") {
      json sj = j;
      sj["n"] = static_cast<long>(a.size());
      if (!has(sj, "space")) sj["space"] = "M";
      try {
        kind = IntegralKind::bk_on(get_space(sj));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    const Complex exact = group_integral_closed(kind, a, s);
    mc_row(o, group_integral_mc(kind, a, s, samples, *o.seed), exact);
    return o;
  }
  if (suite == "polya") {
    const MatrixSpace space = get_space(j);
    const Weight w = parse_weight(get_string(j, "weight"), space);
    const auto x = get_list(j, "x");
    const auto y = get_list(j, "y");
    if (static_cast<int>(x.size()) != space.n() || static_cast<int>(y.size()) != space.n())
      throw ConfigError("x and y need n values");
    const GroupIdentity id = polya_group_identity(space, w, SpectralPoint(x), SpectralPoint(y), samples, *o.seed);
    mc_row(o, id.lhs, id.rhs);
    return o;
  }
  if (suite == "convolution") {
    const MatrixSpace space = get_space(j);
    const SampleFamily f1 = SampleFamily::parse(get_string(j, "family"));
    const SampleFamily f2 = SampleFamily::parse(get_string(j, "family2"));
    const double threshold = get_double(j, "threshold", 0.02);
    const double ks = empirical_convolution_check(space, f1, f2, samples, *o.seed);
    o.verified = ks <= threshold;
    o.csv.header = {"ks_distance", "threshold", "samples", "pass"};
    o.csv.rows.push_back({format_number(ks), format_number(threshold), std::to_string(samples), bool_text(o.verified)});
    return o;
  }
  throw ConfigError("unknown verify suite '" + suite + "' (hciz, bk, gn, polya, convolution)");
}

Outcome cmd_simulate(const json& j) {
  const MatrixSpace space = get_space(j);
  const SampleFamily f1 = SampleFamily::parse(get_string(j, "family"));
  std::optional<SampleFamily> f2;
  if (has(j, "family2")) f2 = SampleFamily::parse(get_string(j, "family2"));
  const long samples = get_long(j, "samples", 1000);
  if (samples < 1 || samples > 100000000) throw ConfigError("samples out of range");
  Outcome o;
  o.seed = get_seed(j);
  o.csv.header = {"sample"};
  for (int c = 1; c <= space.n(); ++c) o.csv.header.push_back("a" + std::to_string(c));
  for (long i = 0; i < samples; ++i) {
    std::mt19937_64 rng(derive_seed(*o.seed, static_cast<std::uint64_t>(i)));
    MatrixXc m = sample_matrix(space, f1, rng);
    if (f2) {
      const MatrixXc m2 = sample_matrix(space, *f2, rng);
      m = space.kind() == SpaceKind::G ? MatrixXc(m * m2) : MatrixXc(m + m2);
    }
    const SpectralPoint sp = spectrum_of(space, m);
    std::vector<std::string> row = {std::to_string(i)};
    for (double v : sp.values()) row.push_back(format_number(v));
    o.csv.rows.push_back(std::move(row));
  }
  return o;
}

const char* kUsage =
    "usage: pe <command> [suite] [options]\n"
    "commands: density, normalize, transform, convolve, pff-check, verify <hciz|bk|gn|polya|convolution>, simulate\n";

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Weight load_table_weight(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weight table '" + path + "'");
  std::vector<double> xs, ws;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, w;
    if (!(ls >> x >> w)) continue;  // header or malformed row
    if (!xs.empty() && !(x > xs.back())) throw ConfigError("weight table: x must increase strictly");
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("weight table: values must be finite and >= 0");
    xs.push_back(x);
    ws.push_back(w);
  }
  if (xs.size() < 2) throw ConfigError("weight table needs at least two rows");
  auto eval = [xs, ws](double x) {
    if (x < xs.front() || x > xs.back()) return 0.0;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (i + 1 >= xs.size()) return ws.back();
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    if (ws[i] > 0.0 && ws[i + 1] > 0.0) return std::exp((1.0 - t) * std::log(ws[i]) + t * std::log(ws[i + 1]));
    return (1.0 - t) * ws[i] + t * ws[i + 1];
  };
  return Weight("table:" + path, Support::interval(xs.front(), xs.back()), eval);
}

Weight parse_weight(const std::string& text, const MatrixSpace& space) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  if (name.empty()) throw ConfigError("empty weight specification");
  if (name == "table") {
    if (colon == std::string::npos) throw ConfigError("table weight needs a path");
    return load_table_weight(text.substr(colon + 1));
  }
  const auto names = family_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError("unknown weight family '" + name + "'");
  FamilyParams params;
  if (name == "laguerre_H2" || name == "jacobi" || name == "cauchy_lorentz") params["n"] = space.n();
  if (colon != std::string::npos) {
    for (const auto& kv : split(text.substr(colon + 1), ',')) {
      if (kv.empty()) continue;
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("weight parameter '" + kv + "' needs key=value");
      params[kv.substr(0, eq)] = to_double(kv.substr(eq + 1), kv.substr(0, eq));
    }
  }
  try {
    return make_family(name, params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polya ensembles toolkit"};
  app.allow_extras(false);
  std::vector<std::string> positional;
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  app.add_option("command", positional, "command [suite]");
  app.add_option("--config", config_path, "JSON configuration file");
  for (const auto& [flag, key] : kValueFlags) app.add_option(flag, values[key]);
  for (const auto& [flag, key] : kBoolFlags) app.add_flag(flag, flags[key]);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << kUsage;
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << kUsage;
    return kConfigError;
  }

  try {
    json config = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
      try {
        config = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      if (!config.is_object()) throw ConfigError("config must be a JSON object");
    }
    for (const auto& [flag, key] : kValueFlags)
      if (app.count(flag) > 0) config[key] = values[key];
    for (const auto& [flag, key] : kBoolFlags)
      if (app.count(flag) > 0) config[key] = flags[key];
    if (!positional.empty()) config["command"] = positional[0];
    if (positional.size() > 1) config["suite"] = positional[1];
    if (positional.size() > 2) throw ConfigError("too many positional arguments");

    const std::string command = has(config, "command") ? get_string(config, "command") : "";
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
      throw ConfigError(command.empty() ? "no command given" : "unknown command '" + command + "'");

    Outcome o;
    if (command == "density") o = cmd_density(config);
    else if (command == "normalize") o = cmd_normalize(config);
    else if (command == "transform") o = cmd_transform(config);
    else if (command == "convolve") o = cmd_convolve(config);
    else if (command == "pff-check") o = cmd_pff(config);
    else if (command == "simulate") o = cmd_simulate(config);
    else o = cmd_verify(has(config, "suite") ? get_string(config, "suite") : "", config);

    const std::uint64_t hash = fnv1a(config.dump());
    if (has(config, "output")) {
      const std::string path = get_string(config, "output");
      std::ofstream file(path);
      if (!file) throw ConfigError("cannot write '" + path + "'");
      write_csv(file, o.csv, hash, o.seed);
    } else {
      write_csv(out, o.csv, hash, o.seed);
    }
    return o.verified ? kOk : kVerificationFailed;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace polya::cli
