#include "uavassoc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "uavassoc/csv.hpp"
#include "uavassoc/errors.hpp"

namespace uavassoc::dataset {

std::vector<double> FeatureVector::flatten() const {
  std::vector<double> out;
  out.reserve(1 + powers_db.size() + distances.size() + interferer_distances.size());
  out.push_back(uav_height);
  out.insert(out.end(), powers_db.begin(), powers_db.end());
  out.insert(out.end(), distances.begin(), distances.end());
  out.insert(out.end(), interferer_distances.begin(), interferer_distances.end());
  return out;
}

namespace {

std::vector<std::size_t> distance_order(const Scenario& scenario) {
  std::vector<std::size_t> order(scenario.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = scenario.link(a).geometry.r;
    const double rb = scenario.link(b).geometry.r;
    if (ra != rb) return ra < rb;
    const auto& pa = scenario.bs(a).position;
    const auto& pb = scenario.bs(b).position;
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return a < b;
  });
  return order;
}

}  // namespace

std::vector<std::size_t> candidate_set(const Scenario& scenario, std::size_t zeta) {
  if (scenario.size() < zeta) {
    throw ScenarioRejected("scenario has " + std::to_string(scenario.size()) +
                           " BSs, need at least " + std::to_string(zeta));
  }
  auto order = distance_order(scenario);
  order.resize(zeta);
  return order;
}

std::vector<std::size_t> distance_ranks(const Scenario& scenario) {
  const auto order = distance_order(scenario);
  std::vector<std::size_t> rank(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
  return rank;
}

std::vector<double> interferer_row(const Scenario& scenario, std::size_t candidate,
                                   const AntennaConfig& antenna, std::size_t xi) {
  std::vector<double> dist;
  for (std::size_t k : radio::footprint_interferers(scenario, candidate, antenna.omega)) {
    dist.push_back(scenario.link(k).geometry.r);
  }
  std::sort(dist.begin(), dist.end());
  dist.resize(xi, 2.0 * scenario.window_radius());
  return dist;
}

FeatureVector extract_features(const Scenario& scenario, const AntennaConfig& antenna,
                               const ChannelParams& params, std::size_t zeta, std::size_t xi) {
  const auto cands = candidate_set(scenario, zeta);
  FeatureVector f;
  f.uav_height = scenario.uav_height();
  f.interferer_distances.reserve(zeta * xi);
  for (std::size_t c : cands) {
    const auto& link = scenario.link(c);
    f.powers_db.push_back(radio::linear_to_db(radio::mean_rx_power_omni(link, params, antenna.n_elements)));
    f.distances.push_back(link.geometry.r);
    const auto row = interferer_row(scenario, c, antenna, xi);
    f.interferer_distances.insert(f.interferer_distances.end(), row.begin(), row.end());
  }
  return f;
}

int label_sample(const Scenario& scenario, const AntennaConfig& antenna,
                 const ChannelParams& params, std::size_t zeta) {
  const auto cands = candidate_set(scenario, zeta);
  const std::vector<double> unit(scenario.size(), 1.0);
  int best = 0;
  double best_sinr = -1.0;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    const double s = radio::directional_sinr(scenario, cands[k], antenna, params, unit);
    if (s > best_sinr) {
      best_sinr = s;
      best = static_cast<int>(k);
    }
  }
  return best;
}

std::vector<double> Normalizer::normalize(std::span<const double> x) const {
  if (x.size() != means.size()) {
    throw DimensionMismatch("normalizer expects " + std::to_string(means.size()) +
                            " features, got " + std::to_string(x.size()));
  }
  std::vector<double> z(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) z[k] = (x[k] - means[k]) / stds[k];
  return z;
}

std::vector<double> Normalizer::denormalize(std::span<const double> z) const {
  if (z.size() != means.size()) {
    throw DimensionMismatch("normalizer expects " + std::to_string(means.size()) +
                            " features, got " + std::to_string(z.size()));
  }
  std::vector<double> x(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) x[k] = z[k] * stds[k] + means[k];
  return x;
}

Normalizer fit_normalizer(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw std::invalid_argument("cannot fit a normalizer on zero rows");
  const std::size_t dim = rows.front().size();
  Normalizer n;
  n.means.assign(dim, 0.0);
  n.stds.assign(dim, 0.0);
  for (const auto& r : rows) {
    if (r.size() != dim) throw DimensionMismatch("ragged feature rows");
    for (std::size_t k = 0; k < dim; ++k) n.means[k] += r[k];
  }
  const double count = static_cast<double>(rows.size());
  for (auto& m : n.means) m /= count;
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = r[k] - n.means[k];
      n.stds[k] += d * d;
    }
  }
  for (auto& s : n.stds) s = std::max(std::sqrt(s / count), Normalizer::kStdFloor);
  return n;
}

namespace {

std::string info_line(const DatasetInfo& info) {
  std::ostringstream os;
  os << "# dataset zeta=" << info.zeta << " xi=" << info.xi
     << " lambda_per_km2=" << csv::format_double(info.lambda_per_km2)
     << " omega_rad=" << csv::format_double(info.omega)
     << " parameter_hash=" << (info.parameter_hash.empty() ? "-" : info.parameter_hash);
  return os.str();
}

void parse_info_line(std::string_view line, DatasetInfo& info) {
  std::istringstream is{std::string(line.substr(2))};
  std::string tok;
  is >> tok;  // "dataset"
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "lambda_per_km2") {
      csv::parse_number(val, info.lambda_per_km2);
    } else if (key == "omega_rad") {
      csv::parse_number(val, info.omega);
    } else if (key == "parameter_hash") {
      info.parameter_hash = val == "-" ? "" : val;
    }
  }
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& data, std::span<const std::string> comments) {
  const std::size_t zeta = data.info.zeta;
  const std::size_t xi = data.info.xi;
  for (const auto& c : comments) out << "# " << c << '\n';
  out << info_line(data.info) << '\n';
  out << "scenario_seed,gamma_m";
  for (std::size_t k = 0; k < zeta; ++k) out << ",p_" << k;
  for (std::size_t k = 0; k < zeta; ++k) out << ",r_" << k;
  for (std::size_t i = 0; i < zeta; ++i) {
    for (std::size_t j = 0; j < xi; ++j) out << ",f_" << i << '_' << j;
  }
  out << ",label\n";
  for (const auto& s : data.samples) {
    const auto flat = s.features.flatten();
    if (flat.size() != feature_length(zeta, xi)) {
      throw DimensionMismatch("sample feature length does not match dataset (zeta, xi)");
    }
    out << s.scenario_seed;
    for (double v : flat) out << ',' << csv::format_double(v);
    out << ',' << s.label << '\n';
  }
}

Dataset read_csv(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind("# dataset ", 0) == 0) parse_info_line(line, data.info);
      continue;
    }
    const auto cells = csv::split(line);
    if (!have_header) {
      if (cells.size() < 4 || cells.front() != "scenario_seed" || cells[1] != "gamma_m" ||
          cells.back() != "label") {
        throw ParseError("header", "unexpected dataset header");
      }
      std::size_t zeta = 0;
      std::size_t f_cols = 0;
      for (auto c : cells) {
        if (c.rfind("r_", 0) == 0) ++zeta;
        if (c.rfind("f_", 0) == 0) ++f_cols;
      }
      if (zeta == 0 || f_cols % zeta != 0 || cells.size() != 3 + 2 * zeta + f_cols) {
        throw ParseError("header", "inconsistent p/r/f column counts");
      }
      data.info.zeta = zeta;
      data.info.xi = f_cols / zeta;
      have_header = true;
      continue;
    }
    const std::size_t zeta = data.info.zeta;
    const std::size_t xi = data.info.xi;
    if (cells.size() != 3 + 2 * zeta + zeta * xi) {
      throw ParseError("line " + std::to_string(line_no), "wrong number of columns");
    }
    LabeledSample s;
    std::vector<double> vals(cells.size() - 2);
    if (!csv::parse_number(cells.front(), s.scenario_seed)) {
      throw ParseError("line " + std::to_string(line_no), "bad scenario_seed");
    }
    for (std::size_t k = 1; k + 1 < cells.size(); ++k) {
      if (!csv::parse_number(cells[k], vals[k - 1])) {
        throw ParseError("line " + std::to_string(line_no), "bad number in column " + std::to_string(k));
      }
    }
    if (!csv::parse_number(cells.back(), s.label) || s.label < 0 ||
        static_cast<std::size_t>(s.label) >= zeta) {
      throw ParseError("line " + std::to_string(line_no), "label outside [0, zeta)");
    }
    auto& f = s.features;
    f.uav_height = vals[0];
    f.powers_db.assign(vals.begin() + 1, vals.begin() + 1 + zeta);
    f.distances.assign(vals.begin() + 1 + zeta, vals.begin() + 1 + 2 * zeta);
    f.interferer_distances.assign(vals.begin() + 1 + 2 * zeta, vals.end());
    data.samples.push_back(std::move(s));
  }
  if (!have_header) throw ParseError("header", "dataset file has no header row");
  return data;
}

}  // namespace uavassoc::dataset
