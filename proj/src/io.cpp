#include "ivar/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ivar/eigensystem.hpp"

namespace ivar {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  return out;
}

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == text.size() && !text.empty(), "invalid number '" + text + "' for '" + key + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '/')) out.push_back(parse_number(key, item));
  require(!out.empty(), "empty value for '" + key + "'");
  return out;
}

// "family:k=v,k=v" -> family and key/value map
std::pair<std::string, std::map<std::string, std::string>> split_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  std::pair<std::string, std::map<std::string, std::string>> out;
  out.first = spec.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    require(eq != std::string::npos && eq > 0, "malformed option '" + item + "' in '" + spec + "'");
    const std::string key = item.substr(0, eq);
    require(!out.second.count(key), "duplicate option '" + key + "' in '" + spec + "'");
    out.second[key] = item.substr(eq + 1);
  }
  return out;
}

void reject_unknown(const std::map<std::string, std::string>& opts, const std::vector<std::string>& known,
                    const std::string& spec) {
  for (const auto& [key, value] : opts) {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    require(ok, "unknown option '" + key + "' in '" + spec + "'");
  }
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_output(path);
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
    out << "\n";
  };
  line(header);
  for (const auto& r : rows) {
    require(r.size() == header.size(), "write_csv: row width differs from header");
    line(r);
  }
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\n') {
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (any) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out = open_output(path);
  out << value.dump(2) << "\n";
}

Domain parse_domain(const std::string& spec) {
  const auto [shape, opts] = split_spec(spec);
  if (spec.find(':') == std::string::npos && shape != "hypercube" && shape != "ball") return Domain::named(spec);
  auto get = [&](const std::string& key, double fallback) {
    const auto it = opts.find(key);
    return it == opts.end() ? fallback : parse_number(key, it->second);
  };
  auto dim = [&]() {
    const double d = get("d", 1.0);
    require(d >= 1.0 && d == std::floor(d) && d <= 1000.0, "domain dimension must be a positive integer");
    return static_cast<int>(d);
  };
  if (shape == "hypercube") {
    reject_unknown(opts, {"d", "lo", "hi"}, spec);
    return Domain::hypercube(dim(), get("lo", -1.0), get("hi", 1.0));
  }
  if (shape == "ball") {
    reject_unknown(opts, {"d", "r"}, spec);
    return Domain::ball(Point::Zero(dim()), get("r", 0.7));
  }
  if (shape == "gaussian") {
    reject_unknown(opts, {"d"}, spec);
    return Domain::gaussian(dim());
  }
  throw ConfigError("unknown domain '" + spec + "'");
}

Kernel parse_kernel(const std::string& spec, int dim) {
  require(dim >= 1, "kernel dimension must be positive");
  const auto [family, opts] = split_spec(spec);
  auto spread = [&](const std::string& key, const std::string& fallback) {
    const auto it = opts.find(key);
    std::vector<double> v = parse_list(key, it == opts.end() ? fallback : it->second);
    if (v.size() == 1) v.assign(static_cast<std::size_t>(dim), v[0]);
    require(static_cast<int>(v.size()) == dim, "'" + key + "' needs 1 or " + std::to_string(dim) + " values");
    return v;
  };
  auto scalar = [&](const std::string& key, double fallback) {
    const auto it = opts.find(key);
    return it == opts.end() ? fallback : parse_number(key, it->second);
  };
  if (family == "se") {
    reject_unknown(opts, {"l", "gamma"}, spec);
    const auto it = opts.find("l");
    require(it != opts.end(), "se kernel needs a length scale (se:l=...)");
    return Kernel::squared_exponential(dim, parse_number("l", it->second), scalar("gamma", 1.0));
  }
  if (family == "se-ard") {
    reject_unknown(opts, {"l", "gamma"}, spec);
    require(opts.count("l"), "se-ard kernel needs length scales (se-ard:l=...)");
    return Kernel::squared_exponential_ard(spread("l", ""), scalar("gamma", 1.0));
  }
  if (family == "mehler") {
    reject_unknown(opts, {"t"}, spec);
    return Kernel::mehler(spread("t", "0.5"));
  }
  if (family == "hermite") {
    reject_unknown(opts, {"t", "terms"}, spec);
    const double terms = scalar("terms", 20.0);
    require(terms >= 1.0 && terms == std::floor(terms), "terms must be a positive integer");
    return truncate_kernel(std::make_shared<HermiteEigenSystem>(spread("t", "0.5")), static_cast<std::size_t>(terms));
  }
  throw ConfigError("unknown kernel family '" + family + "' (expected se, se-ard, mehler or hermite)");
}

nlohmann::json kernel_to_json(const Kernel& kernel) {
  nlohmann::json j;
  j["family"] = to_string(kernel.family());
  j["dim"] = kernel.dim();
  switch (kernel.family()) {
    case KernelFamily::SquaredExponentialIsotropic:
    case KernelFamily::SquaredExponentialArd:
      j["lengths"] = kernel.lengths();
      j["variance"] = kernel.variance();
      break;
    case KernelFamily::MehlerTensorized:
      j["decay"] = kernel.decay();
      break;
    case KernelFamily::FiniteRankMercer: {
      const auto& l = kernel.finite_system()->all_eigenvalues();
      j["eigenvalues"] = std::vector<double>(l.data(), l.data() + l.size());
      break;
    }
  }
  return j;
}

nlohmann::json domain_to_json(const Domain& domain) {
  nlohmann::json j;
  j["dim"] = domain.dim();
  auto disc = [](const Disc& d) { return nlohmann::json{{"cx", d.cx}, {"cy", d.cy}, {"radius", d.radius}}; };
  switch (domain.shape()) {
    case DomainShape::Hypercube:
      j["shape"] = "hypercube";
      j["lower"] = domain.lower();
      j["upper"] = domain.upper();
      break;
    case DomainShape::Ball:
      j["shape"] = "ball";
      j["center"] = std::vector<double>(domain.center().data(), domain.center().data() + domain.center().size());
      j["radius"] = domain.radius();
      break;
    case DomainShape::DiscDifference:
      j["shape"] = "disc-difference";
      j["positive"] = nlohmann::json::array();
      for (const auto& d : domain.positive_discs()) j["positive"].push_back(disc(d));
      j["holes"] = nlohmann::json::array();
      for (const auto& d : domain.holes()) j["holes"].push_back(disc(d));
      break;
    case DomainShape::Gaussian:
      j["shape"] = "gaussian";
      break;
  }
  return j;
}

void write_design_csv(const std::filesystem::path& path, const Design& design) {
  design.validate();
  std::vector<std::string> header;
  for (int k = 0; k < design.dim(); ++k) header.push_back("x" + std::to_string(k + 1));
  if (design.has_observations()) header.push_back("y");
  header.push_back("provenance");
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < design.size(); ++i) {
    std::vector<std::string> r;
    for (int k = 0; k < design.dim(); ++k) r.push_back(format_double(design.points(k, i)));
    if (design.has_observations()) r.push_back(format_double(design.observations(i)));
    r.push_back(design.provenance);
    rows.push_back(std::move(r));
  }
  write_csv(path, header, rows);
}

}  // namespace ivar
