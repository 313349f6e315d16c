// epicon: exact and simulated accuracy of top-k majority congresses.
//
// Every run prints machine-clean data to stdout (or --output FILE) and a
// one-line JSON run manifest to stderr; with --output the manifest is also
// written next to the file. Reruns with identical manifests produce
// byte-identical data output.
//
// Exit codes: 0 success, 2 usage error, 3 invalid argument or data,
// 4 file I/O failure, 5 internal numeric failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epicon/competence.hpp"
#include "epicon/empirics.hpp"
#include "epicon/gain.hpp"
#include "epicon/optimal_size.hpp"
#include "epicon/poisson_binomial.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 42;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) { return epicon::detail::formatDouble(v); }

void requireFinite(double v, const std::string& where) {
  if (!std::isfinite(v)) {
    throw std::logic_error("non-finite value in output: " + where);
  }
}

void requireFinite(const json& doc, const std::string& where) {
  if (doc.is_number_float()) {
    requireFinite(doc.get<double>(), where);
  } else if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      requireFinite(value, where + "." + key);
    }
  } else if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      requireFinite(doc[i], where + "[" + std::to_string(i) + "]");
    }
  }
}

// Flat object as a two-line CSV; grids render their own tables.
std::string flatCsv(const json& obj) {
  std::string header;
  std::string row;
  bool first = true;
  for (const auto& [key, value] : obj.items()) {
    if (!first) {
      header += ',';
      row += ',';
    }
    first = false;
    header += key;
    if (value.is_number_float()) {
      row += fmt(value.get<double>());
    } else if (value.is_string()) {
      row += value.get<std::string>();
    } else {
      row += value.dump();
    }
  }
  return header + "\n" + row + "\n";
}

struct Emitter {
  std::string outFormat;  // "csv" or "json"
  std::string outputPath; // empty: stdout
  json manifest;
  std::chrono::steady_clock::time_point started =
      std::chrono::steady_clock::now();

  void finish(const std::string& data) {
    manifest["duration_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    if (outputPath.empty()) {
      std::cout << data;
    } else {
      std::ofstream out(outputPath);
      if (!out || !(out << data)) {
        throw IoError("cannot write '" + outputPath + "'");
      }
      std::ofstream side(outputPath + ".manifest.json");
      if (!side || !(side << manifest.dump() << "\n")) {
        throw IoError("cannot write '" + outputPath + ".manifest.json'");
      }
    }
    std::cerr << manifest.dump() << "\n";
  }

  void finish(const json& doc) {
    requireFinite(doc, "$");
    if (outFormat == "csv") {
      finish(flatCsv(doc));
    } else {
      finish(doc.dump(2) + "\n");
    }
  }
};

Emitter makeEmitter(const std::string& subcommand, const json& params,
                    const std::string& outFormat,
                    const std::string& outputPath) {
  Emitter e;
  e.outFormat = outFormat;
  e.outputPath = outputPath;
  e.manifest = {{"tool", "epicon"},
                {"version", kVersion},
                {"subcommand", subcommand},
                {"params", params},
                {"out", outFormat}};
  return e;
}

epicon::GainEstimate::Method parseMode(const std::string& mode) {
  if (mode == "exact") return epicon::GainEstimate::Method::kExactConditional;
  if (mode == "votes") return epicon::GainEstimate::Method::kVoteSampling;
  throw std::invalid_argument("mode: expected exact or votes");
}

json hypothesesJson(const epicon::ConditionVerdict& v) {
  json rows = json::array();
  for (const auto& h : v.hypotheses) {
    rows.push_back({{"name", h.name},
                    {"satisfied", h.satisfied},
                    {"lhs", h.lhs},
                    {"rhs", h.rhs}});
  }
  return rows;
}

// ---- subcommand runners -----------------------------------------------------

int runPmf(const std::vector<double>& probs, const std::string& profileSpec,
           std::size_t n, std::uint64_t seed, const std::string& outFormat,
           const std::string& outputPath) {
  epicon::CompetenceProfile profile;
  json params;
  if (!probs.empty()) {
    if (!profileSpec.empty()) {
      throw std::invalid_argument("pmf: pass --probs or --profile, not both");
    }
    profile.probs = probs;
    std::sort(profile.probs.begin(), profile.probs.end(), std::greater<>());
    params["probs"] = probs;
  } else {
    if (profileSpec.empty()) {
      throw std::invalid_argument("pmf: requires --probs or --profile with --n");
    }
    if (n == 0) throw std::invalid_argument("pmf: requires --n >= 1");
    const auto spec = epicon::ProfileSpec::parse(profileSpec);
    profile = spec.materialize(n, seed);
    params["profile"] = spec.spec();
    params["n"] = n;
    params["seed"] = seed;
  }

  auto emitter = makeEmitter("pmf", params, outFormat, outputPath);
  const auto dist = epicon::pmf(profile.span());
  if (outFormat == "csv") {
    std::string text = "j,mass\n";
    for (std::size_t j = 0; j <= dist.trials(); ++j) {
      requireFinite(dist.massAt(j), "mass");
      text += std::to_string(j) + "," + fmt(dist.massAt(j)) + "\n";
    }
    emitter.finish(text);
  } else {
    json doc;
    doc["trials"] = dist.trials();
    doc["majority_prob"] = dist.majorityProb();
    doc["mass"] = dist.mass();
    emitter.finish(doc);
  }
  return 0;
}

int runOptimalSize(const std::string& profileSpec, std::size_t n,
                   const std::vector<std::size_t>& nGrid, std::uint64_t seed,
                   std::string outFormat, const std::string& outputPath) {
  const auto spec = epicon::ProfileSpec::parse(profileSpec);
  json params{{"profile", spec.spec()}, {"seed", seed}};

  if (!nGrid.empty()) {
    params["n_grid"] = nGrid;
    if (outFormat.empty()) outFormat = "csv";
    auto emitter = makeEmitter("optimal-size", params, outFormat, outputPath);
    json rows = json::array();
    std::string text = "n,k_star\n";
    for (const std::size_t gridN : nGrid) {
      const auto res = epicon::optimalK(spec.materialize(gridN, seed));
      std::cerr << "n=" << gridN << " k_star=" << res.kStar << std::endl;
      text += std::to_string(gridN) + "," + std::to_string(res.kStar) + "\n";
      rows.push_back({{"n", gridN},
                      {"k_star", res.kStar},
                      {"max_prob", res.maxProb}});
    }
    if (outFormat == "csv") {
      emitter.finish(text);
    } else {
      requireFinite(rows, "$");
      emitter.finish(rows.dump(2) + "\n");
    }
    return 0;
  }

  if (n == 0) throw std::invalid_argument("optimal-size: requires --n >= 1");
  params["n"] = n;
  if (outFormat.empty()) outFormat = "json";
  auto emitter = makeEmitter("optimal-size", params, outFormat, outputPath);
  const auto res = epicon::optimalK(spec.materialize(n, seed));
  if (outFormat == "csv") {
    std::string text = "k,q_k\n";
    for (const auto& [k, q] : res.qCurve) {
      requireFinite(q, "q_curve");
      text += std::to_string(k) + "," + fmt(q) + "\n";
    }
    emitter.finish(text);
  } else {
    json doc;
    doc["n"] = res.n;
    doc["k_star"] = res.kStar;
    doc["max_prob"] = res.maxProb;
    json curve = json::array();
    for (const auto& [k, q] : res.qCurve) curve.push_back({k, q});
    doc["q_curve"] = std::move(curve);
    emitter.finish(doc);
  }
  return 0;
}

int runBounds(const std::string& distSpec, std::size_t n,
              const std::string& epsText, const std::string& outFormat,
              const std::string& outputPath) {
  if (n == 0) throw std::invalid_argument("bounds: requires --n >= 1");
  json params{{"n", n}};

  if (distSpec.empty()) {
    auto emitter = makeEmitter("bounds", params, outFormat, outputPath);
    const auto [lower, upper] = epicon::uniformBounds(n);
    emitter.finish(json{{"n", n}, {"lower", lower}, {"upper", upper}});
    return 0;
  }

  const auto dist = epicon::CompetenceDistribution::parse(distSpec);
  const auto rule = epicon::EpsRule::parse(epsText.empty() ? "dkw" : epsText);
  const double eps = rule.value(n);
  params["dist"] = dist.spec();
  params["eps"] = rule.spec();
  auto emitter = makeEmitter("bounds", params, outFormat, outputPath);
  const auto b = epicon::boundedSupportBounds(dist, n, eps);
  emitter.finish(json{{"n", n},
                      {"eps", eps},
                      {"c_h", b.cH},
                      {"c_l", b.cL},
                      {"k_lower", b.cH * static_cast<double>(n)},
                      {"k_upper", b.cL * static_cast<double>(n)},
                      {"prob_lower_bound", b.probLowerBound}});
  return 0;
}

int runGain(const std::string& profileSpec, const std::string& distSpec,
            std::size_t n, std::size_t k, double r, std::uint64_t trials,
            const std::string& mode, std::uint64_t seed,
            const std::string& outFormat, const std::string& outputPath) {
  if (n == 0) throw std::invalid_argument("gain: requires --n >= 1");
  if (k == 0 && r == 0.0) {
    throw std::invalid_argument("gain: requires --k or --r");
  }
  if (k != 0 && r != 0.0) {
    throw std::invalid_argument("gain: pass --k or --r, not both");
  }
  const std::size_t kUse = k != 0 ? k : epicon::kFromExponent(n, r);
  if (kUse > n) {
    throw std::invalid_argument("gain: requires k <= n");
  }

  if (trials == 0) {
    if (profileSpec.empty()) {
      throw std::invalid_argument(
          "gain: exact evaluation requires --profile (or pass --trials)");
    }
    if (!distSpec.empty()) {
      throw std::invalid_argument(
          "gain: --dist is for monte carlo; pass --trials or drop it");
    }
    const auto spec = epicon::ProfileSpec::parse(profileSpec);
    json params{{"profile", spec.spec()}, {"n", n}, {"k", kUse},
                {"seed", seed}};
    auto emitter = makeEmitter("gain", params, outFormat, outputPath);
    const auto profile = spec.materialize(n, seed);
    const double rep = epicon::majorityProb(profile.top(kUse));
    const double direct = epicon::majorityProb(profile.span());
    emitter.finish(json{{"n", n},
                        {"k", kUse},
                        {"method", "exact_conditional"},
                        {"trials", 0},
                        {"gain", rep - direct},
                        {"gain_ci95", 0.0},
                        {"rep_acc", rep},
                        {"direct_acc", direct}});
    return 0;
  }

  if (distSpec.empty()) {
    throw std::invalid_argument("gain: monte carlo requires --dist");
  }
  if (!profileSpec.empty()) {
    throw std::invalid_argument(
        "gain: --profile is for exact evaluation; monte carlo samples fresh "
        "profiles from --dist");
  }
  const auto dist = epicon::CompetenceDistribution::parse(distSpec);
  const auto method = parseMode(mode);
  json params{{"dist", dist.spec()},   {"n", n},
              {"k", kUse},             {"trials", trials},
              {"mode", mode},          {"seed", seed}};
  auto emitter = makeEmitter("gain", params, outFormat, outputPath);
  const auto mc =
      epicon::gainMonteCarloDetailed(dist, n, kUse, trials, seed, method);
  emitter.finish(json{{"n", n},
                      {"k", kUse},
                      {"method", epicon::methodName(method)},
                      {"trials", trials},
                      {"gain", mc.gain.value},
                      {"gain_ci95", mc.gain.ci95Halfwidth},
                      {"rep_acc", mc.repAcc},
                      {"rep_ci95", mc.repCi},
                      {"direct_acc", mc.directAcc},
                      {"direct_ci95", mc.directCi}});
  return 0;
}

// flat key=value file, same keys as the experiment flags
void loadExperimentFile(const std::string& path,
                        epicon::ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("experiment config line " +
                                  std::to_string(lineNo) + ": expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "n_grid") {
      config.nGrid.clear();
      std::istringstream vs(value);
      std::string item;
      while (std::getline(vs, item, ',')) {
        config.nGrid.push_back(static_cast<std::size_t>(
            epicon::detail::parseDouble(item, "n_grid")));
      }
    } else if (key == "r") {
      config.r = epicon::detail::parseDouble(value, "r");
    } else if (key == "lo") {
      config.distLo = epicon::detail::parseDouble(value, "lo");
    } else if (key == "hi") {
      config.distHi = epicon::detail::parseDouble(value, "hi");
    } else if (key == "eps") {
      config.epsRule = epicon::EpsRule::parse(value);
    } else if (key == "trials") {
      config.trials = static_cast<std::uint64_t>(
          epicon::detail::parseDouble(value, "trials"));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(
          epicon::detail::parseDouble(value, "seed"));
    } else if (key == "mode") {
      config.mode = parseMode(value);
    } else {
      throw std::invalid_argument("experiment config line " +
                                  std::to_string(lineNo) + ": unknown key '" +
                                  key + "'");
    }
  }
}

int runExperimentCmd(const epicon::ExperimentConfig& config,
                     std::string outFormat, const std::string& outputPath) {
  json params{{"n_grid", config.nGrid},
              {"r", config.r},
              {"lo", config.distLo},
              {"hi", config.distHi},
              {"eps", config.epsRule.spec()},
              {"trials", config.trials},
              {"mode", config.mode ==
                               epicon::GainEstimate::Method::kExactConditional
                           ? "exact"
                           : "votes"},
              {"seed", config.seed}};
  if (outFormat.empty()) outFormat = "csv";
  auto emitter = makeEmitter("experiment", params, outFormat, outputPath);

  const auto rows = epicon::runExperiment(config, &std::cerr);
  if (outFormat == "csv") {
    std::string text = "n,eps_n,k,direct_acc,rep_acc,gain,direct_ci,rep_ci\n";
    for (const auto& row : rows) {
      for (double v : {row.epsN, row.directAcc, row.repAcc, row.gain,
                       row.directCi, row.repCi}) {
        requireFinite(v, "experiment row");
      }
      text += std::to_string(row.n) + "," + fmt(row.epsN) + "," +
              std::to_string(row.k) + "," + fmt(row.directAcc) + "," +
              fmt(row.repAcc) + "," + fmt(row.gain) + "," +
              fmt(row.directCi) + "," + fmt(row.repCi) + "\n";
    }
    emitter.finish(text);
  } else {
    json arr = json::array();
    for (const auto& row : rows) {
      arr.push_back({{"n", row.n},
                     {"eps_n", row.epsN},
                     {"k", row.k},
                     {"direct_acc", row.directAcc},
                     {"rep_acc", row.repAcc},
                     {"gain", row.gain},
                     {"direct_ci", row.directCi},
                     {"rep_ci", row.repCi},
                     {"gain_ci", row.gainCi}});
    }
    requireFinite(arr, "$");
    emitter.finish(arr.dump(2) + "\n");
  }
  return 0;
}

int runRegress(const std::string& csvPath, std::uint64_t predictPop,
               const std::string& outFormat, const std::string& outputPath) {
  {
    std::ifstream probe(csvPath);
    if (!probe) throw IoError("cannot open '" + csvPath + "'");
  }
  json params{{"csv", csvPath}};
  if (predictPop > 0) params["predict"] = predictPop;
  auto emitter = makeEmitter("regress", params, outFormat, outputPath);

  const auto records = epicon::loadRecords(csvPath);
  const auto reg = epicon::loglogRegression(records);
  json doc{{"slope", reg.slope},
           {"intercept", reg.intercept},
           {"r_squared", reg.rSquared},
           {"n_points", reg.nPoints},
           {"log_base", "e"}};
  if (predictPop > 0) {
    doc["population"] = predictPop;
    doc["predicted_seats"] = epicon::predictSize(predictPop, reg);
  }
  emitter.finish(doc);
  return 0;
}

int runConditions(const std::string& theorem, const std::string& family,
                  double a, double shape, double alpha, double r,
                  double sigma0, double gamma, std::size_t n,
                  const std::string& outFormat, const std::string& outputPath) {
  if (n == 0) throw std::invalid_argument("conditions: requires --n >= 1");
  epicon::ConditionVerdict verdict;
  json params{{"theorem", theorem}, {"family", family}, {"a", a}, {"n", n}};

  if (theorem == "dictatorship") {
    epicon::DictatorshipFamily fam;
    if (family == "uniform") {
      fam = epicon::DictatorshipFamily::kUniform;
    } else if (family == "beta") {
      fam = epicon::DictatorshipFamily::kBeta;
      params["shape"] = shape;
    } else {
      throw std::invalid_argument(
          "conditions: dictatorship family must be uniform or beta");
    }
    verdict = epicon::dictatorshipCondition(fam, a, shape, n);
  } else if (theorem == "general-k") {
    epicon::GeneralKParams gk;
    gk.a = a;
    gk.alpha = alpha;
    gk.r = r;
    params["alpha"] = alpha;
    params["r"] = r;
    if (family == "truncnorm") {
      gk.family = epicon::GeneralKParams::Family::kTruncatedNormal;
      gk.sigma0 = sigma0;
      params["sigma0"] = sigma0;
    } else if (family == "beta") {
      gk.family = epicon::GeneralKParams::Family::kBeta;
      gk.gamma = gamma;
      params["gamma"] = gamma;
    } else {
      throw std::invalid_argument(
          "conditions: general-k family must be truncnorm or beta");
    }
    verdict = epicon::generalKCondition(gk, n);
  } else {
    throw std::invalid_argument(
        "conditions: theorem must be dictatorship or general-k");
  }

  auto emitter = makeEmitter("conditions", params, outFormat, outputPath);
  if (emitter.outFormat == "csv") {
    std::string text = "name,satisfied,lhs,rhs\n";
    for (const auto& h : verdict.hypotheses) {
      text += h.name + "," + (h.satisfied ? "true" : "false") + "," +
              fmt(h.lhs) + "," + fmt(h.rhs) + "\n";
    }
    emitter.finish(text);
  } else {
    json doc{{"theorem", epicon::theoremName(verdict.theorem)},
             {"predicted_sign", epicon::signName(verdict.predictedSign)},
             {"n", n},
             {"hypotheses", hypothesesJson(verdict)}};
    // infinities can appear as honest probe values (e.g. an unbounded
    // density); serialize them as strings rather than tripping the guard
    for (auto& h : doc["hypotheses"]) {
      for (const char* key : {"lhs", "rhs"}) {
        if (h[key].is_number_float() && !std::isfinite(h[key].get<double>())) {
          h[key] = h[key].get<double>() > 0 ? "inf" : "-inf";
        }
      }
    }
    emitter.finish(doc);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "epicon: accuracy of top-k majority congresses under heterogeneous "
      "voter competence.\nExit codes: 0 ok, 2 usage, 3 bad argument or data, "
      "4 I/O failure, 5 numeric failure."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("epicon ") + kVersion);

  std::string outFormat;
  std::string outputPath;
  std::uint64_t seed = kDefaultSeed;
  app.add_option("--out", outFormat, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", outputPath, "write data to this file");
  app.add_option("--seed", seed, "RNG seed (default 42)");

  // pmf
  auto* pmfCmd = app.add_subcommand(
      "pmf", "exact success-count distribution of a competence profile");
  std::vector<double> pmfProbs;
  std::string pmfProfile;
  std::size_t pmfN = 0;
  pmfCmd->add_option("--probs", pmfProbs, "explicit competence list")
      ->delimiter(',');
  pmfCmd->add_option("--profile", pmfProfile,
                     "profile source: dist spec or expuniform");
  pmfCmd->add_option("--n", pmfN, "profile size for --profile");

  // optimal-size
  auto* optCmd = app.add_subcommand(
      "optimal-size", "best odd congress size by exhaustive scan");
  std::string optProfile = "expuniform";
  std::size_t optN = 0;
  std::vector<std::size_t> optGrid;
  optCmd->add_option("--profile", optProfile,
                     "profile source: dist spec or expuniform");
  optCmd->add_option("--n", optN, "population size");
  optCmd->add_option("--n-grid", optGrid, "sweep of population sizes")
      ->delimiter(',');

  // bounds
  auto* boundsCmd = app.add_subcommand(
      "bounds", "theoretical bands for the optimal congress size");
  std::string boundsDist;
  std::size_t boundsN = 0;
  std::string boundsEps;
  boundsCmd->add_option("--dist", boundsDist,
                        "distribution spec (omit for the expected-uniform "
                        "closed form)");
  boundsCmd->add_option("--n", boundsN, "population size")->required();
  boundsCmd->add_option("--eps", boundsEps,
                        "band radius rule (default dkw)");

  // gain
  auto* gainCmd = app.add_subcommand(
      "gain", "congress advantage over the full electorate");
  std::string gainProfile;
  std::string gainDist;
  std::size_t gainN = 0;
  std::size_t gainK = 0;
  double gainR = 0.0;
  std::uint64_t gainTrials = 0;
  std::string gainMode = "exact";
  gainCmd->add_option("--profile", gainProfile,
                      "fixed profile source (exact evaluation)");
  gainCmd->add_option("--dist", gainDist,
                      "competence distribution (monte carlo)");
  gainCmd->add_option("--n", gainN, "population size")->required();
  gainCmd->add_option("--k", gainK, "congress size");
  gainCmd->add_option("--r", gainR, "congress size exponent: k = n^r");
  gainCmd->add_option("--trials", gainTrials,
                      "monte carlo trials (0 = exact on a fixed profile)");
  gainCmd->add_option("--mode", gainMode, "exact or votes")
      ->check(CLI::IsMember({"exact", "votes"}));

  // experiment
  auto* expCmd = app.add_subcommand(
      "experiment", "gain sweep over a population grid");
  epicon::ExperimentConfig expConfig;
  expConfig.seed = kDefaultSeed;
  std::string expConfigPath;
  std::vector<std::size_t> expGrid;
  double expR = 0.36;
  double expLo = 0.4;
  double expHi = 0.6;
  std::string expEps;
  std::uint64_t expTrials = 1000;
  std::string expMode = "exact";
  expCmd->add_option("--config", expConfigPath, "key=value config file");
  auto* expGridOpt =
      expCmd->add_option("--n-grid", expGrid, "population grid")->delimiter(',');
  auto* expROpt = expCmd->add_option("--r", expR, "congress size exponent");
  auto* expLoOpt =
      expCmd->add_option("--lo", expLo, "base lower support edge (eps adds)");
  auto* expHiOpt = expCmd->add_option("--hi", expHi, "upper support edge");
  auto* expEpsOpt = expCmd->add_option("--eps", expEps, "bias rule");
  auto* expTrialsOpt =
      expCmd->add_option("--trials", expTrials, "trials per grid point");
  auto* expModeOpt = expCmd->add_option("--mode", expMode, "exact or votes")
                         ->check(CLI::IsMember({"exact", "votes"}));

  // regress
  auto* regCmd = app.add_subcommand(
      "regress", "log-log seat regression on a legislature csv");
  std::string regCsv;
  std::uint64_t regPredict = 0;
  regCmd->add_option("csv", regCsv, "csv path (country,population,seats)")
      ->required();
  regCmd->add_option("--predict", regPredict,
                     "also predict seats for this population");

  // conditions
  auto* condCmd = app.add_subcommand(
      "conditions", "sufficient-condition checks for the gain sign");
  std::string condTheorem;
  std::string condFamily;
  double condA = 0.0;
  double condShape = 1.0;
  double condAlpha = 0.5;
  double condR = 0.36;
  double condSigma0 = 1.0;
  double condGamma = 1.0;
  std::size_t condN = 0;
  condCmd->add_option("--theorem", condTheorem, "dictatorship or general-k")
      ->required();
  condCmd->add_option("--family", condFamily, "preset family")->required();
  condCmd->add_option("--a", condA, "mean bias coefficient")->required();
  condCmd->add_option("--n", condN, "population size")->required();
  condCmd->add_option("--shape", condShape, "beta shape (dictatorship)");
  condCmd->add_option("--alpha", condAlpha, "tail coefficient (general-k)");
  condCmd->add_option("--r", condR, "congress size exponent (general-k)");
  condCmd->add_option("--sigma0", condSigma0,
                      "truncnorm scale before the 1/sqrt(k) shrink");
  condCmd->add_option("--gamma", condGamma, "beta scale per congress seat");

  // let --out/--output/--seed appear after the subcommand name too
  for (auto* sub : {pmfCmd, optCmd, boundsCmd, gainCmd, expCmd, regCmd,
                    condCmd}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (*pmfCmd) {
      return runPmf(pmfProbs, pmfProfile, pmfN, seed,
                    outFormat.empty() ? "json" : outFormat, outputPath);
    }
    if (*optCmd) {
      return runOptimalSize(optProfile, optN, optGrid, seed, outFormat,
                            outputPath);
    }
    if (*boundsCmd) {
      return runBounds(boundsDist, boundsN, boundsEps,
                       outFormat.empty() ? "json" : outFormat, outputPath);
    }
    if (*gainCmd) {
      return runGain(gainProfile, gainDist, gainN, gainK, gainR, gainTrials,
                     gainMode, seed, outFormat.empty() ? "json" : outFormat,
                     outputPath);
    }
    if (*expCmd) {
      if (!expConfigPath.empty()) loadExperimentFile(expConfigPath, expConfig);
      if (expGridOpt->count() > 0 || expConfig.nGrid.empty()) {
        expConfig.nGrid = expGrid;
      }
      if (expROpt->count() > 0) expConfig.r = expR;
      if (expLoOpt->count() > 0) expConfig.distLo = expLo;
      if (expHiOpt->count() > 0) expConfig.distHi = expHi;
      if (expEpsOpt->count() > 0) {
        expConfig.epsRule = epicon::EpsRule::parse(expEps);
      }
      if (expTrialsOpt->count() > 0) expConfig.trials = expTrials;
      if (expModeOpt->count() > 0) expConfig.mode = parseMode(expMode);
      if (app.count("--seed") > 0) expConfig.seed = seed;
      return runExperimentCmd(expConfig, outFormat, outputPath);
    }
    if (*regCmd) {
      return runRegress(regCsv, regPredict,
                        outFormat.empty() ? "json" : outFormat, outputPath);
    }
    if (*condCmd) {
      return runConditions(condTheorem, condFamily, condA, condShape,
                           condAlpha, condR, condSigma0, condGamma, condN,
                           outFormat.empty() ? "json" : outFormat, outputPath);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    std::cerr << "error: " << msg << "\n";
    if (msg.find("cannot open") != std::string::npos) return 4;
    if (msg.rfind("legislature csv:", 0) == 0) return 3;
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
