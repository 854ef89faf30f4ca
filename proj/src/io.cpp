#include "gpcausal/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gpcausal/version.hpp"

namespace gpcausal {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  std::string lower;
  for (char c : cell) lower.push_back(static_cast<char>(std::tolower(c)));
  return lower == "na" || lower == "nan" || lower == "null";
}

double parse_cell(const std::string& cell, long row, const std::string& column) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw DataError("csv: non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                    ", column '" + column + "'");
  }
}

double parse_number(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw DataError("config: value '" + value + "' for key '" + key + "' is not a number");
  }
}

long parse_long(const std::string& value, const std::string& key) {
  const double v = parse_number(value, key);
  if (v != std::floor(v)) throw DataError("config: key '" + key + "' must be an integer");
  return static_cast<long>(v);
}

bool parse_flag(const std::string& value, const std::string& key) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw DataError("config: key '" + key + "' must be on/off");
}

std::string flag_str(bool b) { return b ? "on" : "off"; }

using Entries = std::vector<std::pair<std::string, std::string>>;

void append_config_entries(Entries& e, const HyperPriorConfig& hp, const McmcConfig& mc) {
  auto num = [](double v) { return format_double(v); };
  e.emplace_back("mcmc.chains", std::to_string(mc.n_chains));
  e.emplace_back("mcmc.burnin", std::to_string(mc.n_burnin));
  e.emplace_back("mcmc.kept", std::to_string(mc.n_kept_iterations));
  e.emplace_back("mcmc.thin", std::to_string(mc.thin));
  e.emplace_back("mcmc.seed", std::to_string(mc.seed));
  e.emplace_back("mcmc.adapt", flag_str(mc.adapt));
  e.emplace_back("mcmc.adapt_target", num(mc.adapt_target));
  e.emplace_back("mcmc.conjugate_sigma2", flag_str(mc.conjugate_sigma2));
  e.emplace_back("hyper.sigma2_beta", num(hp.sigma2_beta));
  const std::pair<const char*, const GammaPrior*> gammas[] = {
      {"l_mu", &hp.l_mu}, {"eta_mu", &hp.eta_mu}, {"l_delta", &hp.l_delta},
      {"eta_delta", &hp.eta_delta}};
  for (const auto& [name, g] : gammas) {
    e.emplace_back(std::string("hyper.") + name + ".shape", num(g->shape));
    e.emplace_back(std::string("hyper.") + name + ".rate", num(g->rate));
  }
  e.emplace_back("hyper.sigma2.shape", num(hp.sigma2.shape));
  e.emplace_back("hyper.sigma2.scale", num(hp.sigma2.scale));
  e.emplace_back("hyper.tau.l_mu", num(hp.tau.l_mu));
  e.emplace_back("hyper.tau.eta_mu", num(hp.tau.eta_mu));
  e.emplace_back("hyper.tau.l_delta", num(hp.tau.l_delta));
  e.emplace_back("hyper.tau.eta_delta", num(hp.tau.eta_delta));
  e.emplace_back("hyper.tau.sigma2", num(hp.tau.sigma2));
}

// Applies a key to (hp, mc); returns false if the key is not a config key.
bool apply_config_key(const std::string& key, const std::string& value, HyperPriorConfig& hp,
                      McmcConfig& mc) {
  if (key == "mcmc.chains" || key == "chains") mc.n_chains = static_cast<int>(parse_long(value, key));
  else if (key == "mcmc.burnin" || key == "burnin") mc.n_burnin = parse_long(value, key);
  else if (key == "mcmc.kept" || key == "kept") mc.n_kept_iterations = parse_long(value, key);
  else if (key == "mcmc.thin" || key == "thin") mc.thin = parse_long(value, key);
  else if (key == "mcmc.seed" || key == "seed") mc.seed = static_cast<std::uint64_t>(parse_long(value, key));
  else if (key == "mcmc.adapt" || key == "adapt") mc.adapt = parse_flag(value, key);
  else if (key == "mcmc.adapt_target") mc.adapt_target = parse_number(value, key);
  else if (key == "mcmc.conjugate_sigma2") mc.conjugate_sigma2 = parse_flag(value, key);
  else if (key == "hyper.sigma2_beta") hp.sigma2_beta = parse_number(value, key);
  else if (key == "hyper.l_mu.shape") hp.l_mu.shape = parse_number(value, key);
  else if (key == "hyper.l_mu.rate") hp.l_mu.rate = parse_number(value, key);
  else if (key == "hyper.eta_mu.shape") hp.eta_mu.shape = parse_number(value, key);
  else if (key == "hyper.eta_mu.rate") hp.eta_mu.rate = parse_number(value, key);
  else if (key == "hyper.l_delta.shape") hp.l_delta.shape = parse_number(value, key);
  else if (key == "hyper.l_delta.rate") hp.l_delta.rate = parse_number(value, key);
  else if (key == "hyper.eta_delta.shape") hp.eta_delta.shape = parse_number(value, key);
  else if (key == "hyper.eta_delta.rate") hp.eta_delta.rate = parse_number(value, key);
  else if (key == "hyper.sigma2.shape") hp.sigma2.shape = parse_number(value, key);
  else if (key == "hyper.sigma2.scale") hp.sigma2.scale = parse_number(value, key);
  else if (key == "hyper.tau.l_mu") hp.tau.l_mu = parse_number(value, key);
  else if (key == "hyper.tau.eta_mu") hp.tau.eta_mu = parse_number(value, key);
  else if (key == "hyper.tau.l_delta") hp.tau.l_delta = parse_number(value, key);
  else if (key == "hyper.tau.eta_delta") hp.tau.eta_delta = parse_number(value, key);
  else if (key == "hyper.tau.sigma2") hp.tau.sigma2 = parse_number(value, key);
  else return false;
  return true;
}

void write_lines(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << content;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::uint64_t h = 14695981039346656037ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Eigen::MatrixXd Standardization::destandardize(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const ColumnEncoding& enc = columns[static_cast<std::size_t>(j)];
    if (enc.binary) {
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        out(i, j) = x(i, j) == 1.0 ? enc.high : enc.low;
    } else {
      out.col(j) = x.col(j).array() * enc.sd + enc.mean;
    }
  }
  return out;
}

IngestResult ingest_csv(const std::string& path, const ColumnSelection& columns,
                        OutcomeType mode) {
  std::ifstream in(path);
  if (!in) throw DataError("csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: file '" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);

  auto column_index = [&](const std::string& name) -> Eigen::Index {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("csv: column '" + name + "' not found in header");
    return static_cast<Eigen::Index>(it - header.begin());
  };
  const Eigen::Index y_idx = column_index(columns.outcome);
  const Eigen::Index a_idx = column_index(columns.treatment);
  std::vector<Eigen::Index> x_idx;
  if (columns.covariates.empty()) throw DataError("csv: no covariate columns selected");
  for (const auto& name : columns.covariates) x_idx.push_back(column_index(name));

  std::vector<double> y_raw, a_raw;
  std::vector<std::vector<double>> x_raw(x_idx.size());
  std::vector<long> rejected_rows;
  long row = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("csv: row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    bool missing = is_missing(cells[y_idx]) || is_missing(cells[a_idx]);
    for (const Eigen::Index j : x_idx) missing = missing || is_missing(cells[j]);
    if (missing) {
      rejected_rows.push_back(row);
      continue;
    }
    const double a_val = parse_cell(cells[a_idx], row, columns.treatment);
    if (a_val != 0.0 && a_val != 1.0) {
      throw DataError("csv: treatment value '" + cells[a_idx] + "' at row " +
                      std::to_string(row) + ", column '" + columns.treatment +
                      "' must be 0 or 1");
    }
    a_raw.push_back(a_val);
    y_raw.push_back(parse_cell(cells[y_idx], row, columns.outcome));
    for (std::size_t j = 0; j < x_idx.size(); ++j) {
      x_raw[j].push_back(parse_cell(cells[x_idx[j]], row, columns.covariates[j]));
    }
  }
  if (y_raw.empty()) throw DataError("csv: file '" + path + "' has no data rows");
  if (!rejected_rows.empty() && y_raw.size() < 2) {
    throw DataError("csv: fewer than 2 complete rows after rejecting missing values");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(y_raw.size());
  IngestResult result;
  result.digest = file_digest(path);
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(y_raw.data(), n);
  Eigen::VectorXd a = Eigen::Map<Eigen::VectorXd>(a_raw.data(), n);
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(x_idx.size()));

  for (std::size_t j = 0; j < x_raw.size(); ++j) {
    ColumnEncoding enc;
    enc.name = columns.covariates[j];
    std::set<double> distinct(x_raw[j].begin(), x_raw[j].end());
    if (distinct.size() <= 1) {
      throw DataError("csv: zero-variance covariate '" + enc.name + "'");
    }
    const Eigen::Index col = static_cast<Eigen::Index>(j);
    if (distinct.size() == 2) {
      enc.binary = true;
      enc.low = *distinct.begin();
      enc.high = *std::next(distinct.begin());
      for (Eigen::Index i = 0; i < n; ++i) x(i, col) = x_raw[j][i] == enc.high ? 1.0 : 0.0;
    } else {
      const Eigen::Map<Eigen::VectorXd> raw(x_raw[j].data(), n);
      enc.mean = raw.mean();
      enc.sd = std::sqrt((raw.array() - enc.mean).square().sum() / static_cast<double>(n - 1));
      x.col(col) = (raw.array() - enc.mean) / enc.sd;
    }
    result.standardization.columns.push_back(enc);
  }

  result.data = Dataset::make(std::move(y), std::move(a), std::move(x));
  result.data.validate(mode);
  return result;
}

KeyValueMap read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  KeyValueMap map;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw DataError("'" + path + "' line " + std::to_string(row) + ": expected key=value");
    }
    map[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return map;
}

void write_key_value_file(const std::string& path,
                          const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string content;
  for (const auto& [k, v] : entries) content += k + "=" + v + "\n";
  write_lines(path, content);
}

FitOutputs run_fit(const FitRequest& request) {
  request.hyper.validate();
  request.mcmc.validate();
  std::filesystem::create_directories(request.output_dir);
  const IngestResult ingest = ingest_csv(request.input_path, request.columns, request.mode);

  const auto t_start = std::chrono::steady_clock::now();
  const FitResult fit = run_chains(ingest.data, request.hyper, request.mcmc, request.mode, 1);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  const PosteriorSummary summary = summarize_ate(fit.draws);
  const SubjectEffectSummary subjects = summarize_subjects(fit.draws);
  const bool binary = request.mode == OutcomeType::binary;

  FitOutputs outputs;
  const std::filesystem::path dir(request.output_dir);
  outputs.draws_path = (dir / "draws.csv").string();
  outputs.summary_path = (dir / "ate_summary.csv").string();
  outputs.subjects_path = (dir / "subjects.csv").string();
  outputs.manifest_path = (dir / "manifest.txt").string();

  {
    std::string out = binary ? "chain,iteration,p1,p0,psi_rd,l_mu,eta_mu,l_delta,eta_delta\n"
                             : "chain,iteration,psi,l_mu,eta_mu,l_delta,eta_delta,sigma2\n";
    for (std::size_t i = 0; i < fit.draws.size(); ++i) {
      const ParamState& s = fit.draws.states[i];
      out += std::to_string(fit.draws.chain[i]) + "," + std::to_string(fit.draws.iteration[i]);
      if (binary) {
        out += "," + format_double(fit.draws.p1[i]) + "," + format_double(fit.draws.p0[i]);
      }
      out += "," + format_double(fit.draws.psi[i]) + "," + format_double(s.l_mu) + "," +
             format_double(s.eta_mu) + "," + format_double(s.l_delta) + "," +
             format_double(s.eta_delta);
      if (!binary) out += "," + format_double(s.sigma2);
      out += "\n";
    }
    write_lines(outputs.draws_path, out);
  }
  {
    std::string out = "estimand,estimate,sd,ci_lo,ci_hi,draws\n";
    out += std::string(binary ? "risk_difference" : "ate") + "," + format_double(summary.estimate) +
           "," + format_double(summary.sd) + "," + format_double(summary.ci_lo) + "," +
           format_double(summary.ci_hi) + "," + std::to_string(summary.draws) + "\n";
    write_lines(outputs.summary_path, out);
  }
  {
    std::string out = "subject,delta_mean,delta_sd,scale\n";
    const char* scale = subjects.latent_scale ? "latent" : "outcome";
    for (Eigen::Index i = 0; i < subjects.mean.size(); ++i) {
      out += std::to_string(i) + "," + format_double(subjects.mean(i)) + "," +
             format_double(subjects.sd(i)) + "," + scale + "\n";
    }
    write_lines(outputs.subjects_path, out);
  }
  {
    Entries e;
    e.emplace_back("version", kVersion);
    e.emplace_back("command", "fit");
    e.emplace_back("input.path", request.input_path);
    e.emplace_back("input.digest", ingest.digest);
    e.emplace_back("outcome.column", request.columns.outcome);
    e.emplace_back("treatment.column", request.columns.treatment);
    std::string covs;
    for (const auto& c : request.columns.covariates) covs += (covs.empty() ? "" : ",") + c;
    e.emplace_back("covariate.columns", covs);
    e.emplace_back("outcome.type", binary ? "binary" : "continuous");
    append_config_entries(e, request.hyper, request.mcmc);
    for (const auto& enc : ingest.standardization.columns) {
      const std::string prefix = "standardize." + enc.name;
      if (enc.binary) {
        e.emplace_back(prefix + ".kind", "binary");
        e.emplace_back(prefix + ".low", format_double(enc.low));
        e.emplace_back(prefix + ".high", format_double(enc.high));
      } else {
        e.emplace_back(prefix + ".kind", "continuous");
        e.emplace_back(prefix + ".mean", format_double(enc.mean));
        e.emplace_back(prefix + ".sd", format_double(enc.sd));
      }
    }
    for (const auto& d : fit.chains) {
      const std::string prefix = "chain." + std::to_string(d.chain_index);
      for (int p = 0; p < kNumScalarParams; ++p) {
        e.emplace_back(prefix + ".accept." + scalar_param_name(static_cast<ScalarParam>(p)),
                       format_double(d.accept_rate[p]));
      }
      e.emplace_back(prefix + ".jitter_events", std::to_string(d.jitter_events));
      e.emplace_back(prefix + ".factorization_rejects", std::to_string(d.factorization_rejects));
      e.emplace_back(prefix + ".wall_seconds", format_double(d.wall_seconds));
    }
    e.emplace_back("timing.total_seconds", format_double(wall));
    e.emplace_back("output.draws", outputs.draws_path);
    e.emplace_back("output.summary", outputs.summary_path);
    e.emplace_back("output.subjects", outputs.subjects_path);
    write_key_value_file(outputs.manifest_path, e);
  }
  return outputs;
}

FitRequest fit_request_from_manifest(const std::string& manifest_path) {
  const KeyValueMap kv = read_key_value_file(manifest_path);
  auto require = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw DataError("manifest: missing key '" + key + "'");
    return it->second;
  };
  FitRequest req;
  req.input_path = require("input.path");
  req.columns.outcome = require("outcome.column");
  req.columns.treatment = require("treatment.column");
  std::stringstream ss(require("covariate.columns"));
  std::string item;
  while (std::getline(ss, item, ',')) req.columns.covariates.push_back(trim(item));
  req.mode = require("outcome.type") == "binary" ? OutcomeType::binary : OutcomeType::continuous;
  for (const auto& [key, value] : kv) apply_config_key(key, value, req.hyper, req.mcmc);

  const std::string recorded_digest = require("input.digest");
  const std::string current = file_digest(req.input_path);
  if (current != recorded_digest) {
    throw DataError("manifest: input file digest mismatch (expected " + recorded_digest +
                    ", found " + current + ")");
  }
  return req;
}

ScenarioSpec scenario_from_file(const std::string& path) {
  const KeyValueMap kv = read_key_value_file(path);
  const auto fam_it = kv.find("family");
  if (fam_it == kv.end()) throw DataError("scenario: missing 'family' key");
  ScenarioSpec spec;
  spec.family = parse_scenario_family(fam_it->second);
  // Harness default: single chain per replication.
  spec.mcmc.n_chains = 1;
  spec.mcmc.n_burnin = 2000;
  spec.mcmc.n_kept_iterations = 1000;
  spec.mcmc.thin = 5;

  for (const auto& [key, value] : kv) {
    if (key == "family") continue;
    if (key == "mu1") spec.overlap.mu1 = parse_number(value, key);
    else if (key == "mu2") spec.overlap.mu2 = parse_number(value, key);
    else if (key == "p") spec.overlap.p = parse_number(value, key);
    else if (key == "c") spec.c = parse_number(value, key);
    else if (key == "n") spec.n = parse_long(value, key);
    else if (key == "replications") spec.replications = static_cast<int>(parse_long(value, key));
    else if (apply_config_key(key, value, spec.hyper, spec.mcmc)) continue;
    else throw DataError("scenario: unknown key '" + key + "'");
  }
  spec.validate();
  return spec;
}

SimulateOutputs run_simulate(const std::string& spec_path, const std::string& output_dir) {
  const ScenarioSpec spec = scenario_from_file(spec_path);
  std::filesystem::create_directories(output_dir);
  const ReplicationReport report = run_replications(spec);

  SimulateOutputs outputs;
  const std::filesystem::path dir(output_dir);
  outputs.report_path = (dir / "report.csv").string();
  outputs.detail_path = (dir / "replications.csv").string();
  outputs.manifest_path = (dir / "manifest.txt").string();

  {
    std::string out = "method,ate,abs_bias,pct_bias,mean_sd,se,coverage,failures\n";
    for (const auto& m : report.methods) {
      out += m.method + "," + format_double(m.ate) + "," + format_double(m.abs_bias) + "," +
             format_double(m.pct_bias) + "," + format_double(m.mean_sd) + "," +
             format_double(m.se) + "," + format_double(m.coverage) + "," +
             std::to_string(m.failures) + "\n";
    }
    write_lines(outputs.report_path, out);
  }
  {
    std::string out = "method,k,estimate,sd,ci_lo,ci_hi,truth,covered,failed\n";
    auto rows = [&out](const char* method, const std::vector<ReplicationRow>& v) {
      for (const auto& r : v) {
        out += std::string(method) + "," + std::to_string(r.k) + "," + format_double(r.estimate) +
               "," + format_double(r.sd) + "," + format_double(r.ci_lo) + "," +
               format_double(r.ci_hi) + "," + format_double(r.truth) + "," +
               (r.covered ? "1" : "0") + "," + (r.failed ? "1" : "0") + "\n";
      }
    };
    rows("gp", report.gp_rows);
    rows("glm", report.glm_rows);
    write_lines(outputs.detail_path, out);
  }
  {
    Entries e;
    e.emplace_back("version", kVersion);
    e.emplace_back("command", "simulate");
    e.emplace_back("spec.path", spec_path);
    e.emplace_back("spec.digest", file_digest(spec_path));
    e.emplace_back("family", scenario_family_name(spec.family));
    e.emplace_back("mu1", format_double(spec.overlap.mu1));
    e.emplace_back("mu2", format_double(spec.overlap.mu2));
    e.emplace_back("p", format_double(spec.overlap.p));
    e.emplace_back("c", format_double(spec.c));
    e.emplace_back("n", std::to_string(spec.n));
    e.emplace_back("replications", std::to_string(spec.replications));
    append_config_entries(e, spec.hyper, spec.mcmc);
    for (int p = 0; p < kNumScalarParams; ++p) {
      e.emplace_back(std::string("gp.accept.") + scalar_param_name(static_cast<ScalarParam>(p)),
                     format_double(report.gp_accept_rate[p]));
    }
    e.emplace_back("gp.jitter_events", std::to_string(report.gp_jitter_events));
    e.emplace_back("replications.failed", std::to_string(report.n_failed));
    e.emplace_back("timing.total_seconds", format_double(report.wall_seconds));
    write_key_value_file(outputs.manifest_path, e);
  }
  return outputs;
}

}  // namespace gpcausal
