#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "cli/commands.hpp"

namespace qtec::cli {
namespace {

[[noreturn]] void bad_spec(std::string_view spec, const std::string& why) {
  throw Error(ErrorKind::ParseError, "family '" + std::string(spec) + "': " + why);
}

std::map<std::string, std::string> parse_params(std::string_view spec, std::string_view body) {
  std::map<std::string, std::string> params;
  while (!body.empty()) {
    const std::size_t comma = body.find(',');
    const std::string_view item = body.substr(0, comma);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) bad_spec(spec, "expected key=value, got '" + std::string(item) + "'");
    const std::string key(item.substr(0, eq));
    if (params.count(key)) bad_spec(spec, "duplicate parameter '" + key + "'");
    params[key] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return params;
}

class Params {
 public:
  Params(std::string_view spec, std::map<std::string, std::string> values) : spec_(spec), values_(std::move(values)) {}

  double real(const std::string& key) {
    const std::string& s = take(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
      bad_spec(spec_, "parameter '" + key + "' is not a number");
    return v;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t minimum) {
    const std::string& s = take(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) bad_spec(spec_, "parameter '" + key + "' is not an integer");
    if (v < minimum) bad_spec(spec_, "parameter '" + key + "' must be >= " + std::to_string(minimum));
    return v;
  }

  void finish() const {
    for (const auto& [key, value] : values_)
      if (!used_.count(key)) bad_spec(spec_, "unknown parameter '" + key + "'");
  }

 private:
  const std::string& take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) bad_spec(spec_, "missing parameter '" + key + "'");
    used_[key] = true;
    return it->second;
  }

  std::string_view spec_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> used_;
};

// exp(-i omega P) for an involutory P.
ComplexMatrix rotation(const ComplexMatrix& p, double omega) {
  return ComplexMatrix::identity(p.rows()) * complex{std::cos(omega)} + p * complex{0.0, -std::sin(omega)};
}

}  // namespace

LoadedChannel family_channel(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  Params p(spec, colon == std::string_view::npos ? std::map<std::string, std::string>{}
                                                 : parse_params(spec, spec.substr(colon + 1)));
  const auto done = [&](KrausChannel ch) {
    p.finish();
    return LoadedChannel{std::move(ch), std::string(spec)};
  };
  if (name == "identity") return done(identity_channel(p.integer("n", 2)));
  if (name == "dephasing") return done(dephasing(p.integer("n", 2)));
  if (name == "depolarizing") {
    const auto n = p.integer("n", 2);
    return done(depolarizing(n, p.real("q")));
  }
  if (name == "bitflip") return done(unitary_channel(rotation(pauli::x(), kPi / 2.0)));
  if (name == "xrot") return done(unitary_channel(rotation(pauli::x(), p.real("omega"))));
  if (name == "zrot") return done(unitary_channel(rotation(pauli::z(), p.real("omega"))));
  if (name == "unitary") {
    const auto n = p.integer("n", 2);
    return done(unitary_channel(random_unitary(n, p.integer("seed", 0))));
  }
  if (name == "random") {
    const auto n = p.integer("n", 2);
    const auto d = p.integer("d", 1);
    return done(random_channel(n, d, p.integer("seed", 0)));
  }
  bad_spec(spec, "unknown family '" + name + "'");
}

LoadedChannel load_channel(const RunConfig& cfg) {
  const bool has_file = !cfg.channel_path.empty(), has_family = !cfg.family.empty();
  if (has_file == has_family) {
    throw Error(ErrorKind::ParseError, "exactly one of --channel or --family is required");
  }
  if (has_family) return family_channel(cfg.family);
  ChannelParseOptions opts;
  opts.allow_incomplete = cfg.allow_incomplete;
  return {read_channel_file(cfg.channel_path, opts), cfg.channel_path};
}

}  // namespace qtec::cli
