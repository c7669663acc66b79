#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "confaudit/csv.hpp"
#include "confaudit/dataset.hpp"
#include "confaudit/error.hpp"
#include "confaudit/parallel.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/roc.hpp"
#include "confaudit/util.hpp"

namespace confaudit {

// One planted covariate. The signal value that enters the outcome logit and
// the feature leak is: the raw value for continuous (standard normal) and
// binary (0/1) variables, and a standardized level index for categorical
// variables (uniform levels "L1".."Lk").
struct SynthCovariate {
  std::string name;
  VarKind kind = VarKind::Binary;
  VarGroup group = VarGroup::Pt;  // Pt draws per patient, Hp per row
  double effect_on_outcome = 0.0;  // log-odds per unit of signal
  double leak_strength = 0.0;      // feature shift per unit of signal
  int n_levels = 4;                // categorical only
  double missing_rate = 0.0;
};

struct ConfoundSpec {
  int n_patients = 0;
  int rows_per_patient_min = 1;
  int rows_per_patient_max = 1;
  double prevalence = 0.1;
  std::vector<SynthCovariate> covariates;
  double direct_signal = 0.0;  // outcome -> feature shift along u0
  int feature_dim = 8;
  double noise_sd = 1.0;
  double patient_intercept_sd = 0.2;
  std::string outcome_name = "outcome";
  std::uint64_t seed = 0;
};

struct GroundTruth {
  Eigen::VectorXd outcome_probability;  // per row
  Eigen::MatrixXd feature_means;        // per row
  Eigen::MatrixXd directions;           // (1 + C) x D; row 0 carries u0
  Eigen::MatrixXd covariate_signal;     // n x C signal values
  double intercept = 0.0;
  double achieved_prevalence = 0.0;
};

struct SynthResult {
  Dataset data;
  GroundTruth truth;
};

namespace detail {

inline void validate_spec(const ConfoundSpec& spec) {
  if (spec.n_patients < 2) throw ConfigError("synth: need at least 2 patients");
  if (!(spec.prevalence > 0.0 && spec.prevalence < 1.0))
    throw ConfigError("synth: prevalence must be in (0,1)");
  if (spec.feature_dim < 1) throw ConfigError("synth: feature_dim must be >= 1");
  if (spec.rows_per_patient_min < 1 ||
      spec.rows_per_patient_max < spec.rows_per_patient_min)
    throw ConfigError("synth: invalid rows-per-patient range");
  if (spec.noise_sd <= 0) throw ConfigError("synth: noise_sd must be positive");
  if (spec.direct_signal < 0)
    throw ConfigError("synth: direct_signal must be non-negative");
  if (spec.feature_dim < 1 + static_cast<int>(spec.covariates.size()))
    throw ConfigError(
        "synth: feature_dim must be at least 1 + number of covariates for "
        "orthonormal leak directions");
  for (const auto& cov : spec.covariates) {
    if (cov.leak_strength < 0)
      throw ConfigError("synth: leak strengths must be non-negative");
    if (cov.missing_rate < 0 || cov.missing_rate >= 1)
      throw ConfigError("synth: missing_rate must be in [0,1)");
    if (cov.kind == VarKind::Categorical && cov.n_levels < 2)
      throw ConfigError("synth: categorical covariates need >= 2 levels");
    if (cov.group != VarGroup::Pt && cov.group != VarGroup::Hp)
      throw ConfigError("synth: covariate groups must be pt or hp");
  }
}

// Deterministic orthonormal rows: seeded normals then Gram-Schmidt.
inline Eigen::MatrixXd orthonormal_directions(int count, int dim,
                                              std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd M(count, dim);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < dim; ++j) M(i, j) = rng.normal();
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < i; ++j) M.row(i) -= M.row(i).dot(M.row(j)) * M.row(j);
    double norm = M.row(i).norm();
    if (norm < 1e-10)
      throw NumericError("synth: degenerate direction draw");
    M.row(i) /= norm;
  }
  return M;
}

struct CovariateDraw {
  double signal = 0.0;
  double raw = 0.0;        // numeric value stored for non-categorical kinds
  int level_index = 0;     // categorical level
};

inline CovariateDraw draw_covariate(const SynthCovariate& cov, Rng& rng) {
  CovariateDraw d;
  if (cov.kind == VarKind::Continuous) {
    d.raw = rng.normal();
    d.signal = d.raw;
  } else if (cov.kind == VarKind::Binary) {
    d.raw = rng.u01() < 0.5 ? 0.0 : 1.0;
    d.signal = d.raw;
  } else {
    int L = cov.n_levels;
    d.level_index = static_cast<int>(rng.below(static_cast<std::uint64_t>(L)));
    double sd = std::sqrt((static_cast<double>(L) * L - 1.0) / 12.0);
    d.signal = (static_cast<double>(d.level_index) -
                (static_cast<double>(L) - 1.0) / 2.0) /
               sd;
  }
  return d;
}

// Intercept solving mean sigmoid(alpha + logit) = prevalence by bisection.
inline double solve_intercept(const std::vector<double>& logits,
                              double prevalence) {
  auto mean_prob = [&](double alpha) {
    double s = 0.0;
    for (double l : logits) s += sigmoid(alpha + l);
    return s / static_cast<double>(logits.size());
  };
  double lo = -60.0, hi = 60.0;
  double p_lo = mean_prob(lo), p_hi = mean_prob(hi);
  if (prevalence < p_lo || prevalence > p_hi)
    throw DataError("synth: prevalence " + format_double(prevalence) +
                    " unreachable; achievable range [" + format_double(p_lo) +
                    ", " + format_double(p_hi) + "]");
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mean_prob(mid) < prevalence) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Generates a dataset with fully specified confounding structure:
//   logit(outcome) = alpha + sum_i effect_i * signal_i + patient intercept
//   features = direct_signal * outcome * u0
//            + sum_i leak_i * signal_i * u_i + noise_sd * N(0, I)
// with {u_i} fixed orthonormal directions so the planted structure is
// recoverable by PCA. The intercept alpha is solved by bisection to hit the
// target prevalence on the realized rows. PT covariates are drawn once per
// patient, HP covariates per row. Bit-identical regeneration per seed.
inline SynthResult generate(const ConfoundSpec& spec) {
  detail::validate_spec(spec);
  const int C = static_cast<int>(spec.covariates.size());
  const int D = spec.feature_dim;

  Eigen::MatrixXd directions =
      detail::orthonormal_directions(1 + C, D, derive_seed(spec.seed, "directions"));

  // patient pass: row counts, intercepts, PT covariates
  std::uint64_t patient_root = derive_seed(spec.seed, "patient");
  std::vector<int> patient_of_row;
  std::vector<double> patient_intercept(static_cast<std::size_t>(spec.n_patients));
  std::vector<std::vector<detail::CovariateDraw>> patient_cov(
      static_cast<std::size_t>(spec.n_patients));
  for (int p = 0; p < spec.n_patients; ++p) {
    Rng rng(derive_seed(patient_root, static_cast<std::uint64_t>(p)));
    int count = spec.rows_per_patient_min;
    if (spec.rows_per_patient_max > spec.rows_per_patient_min)
      count = static_cast<int>(rng.uniform_int(spec.rows_per_patient_min,
                                               spec.rows_per_patient_max));
    patient_intercept[static_cast<std::size_t>(p)] =
        spec.patient_intercept_sd > 0 ? spec.patient_intercept_sd * rng.normal()
                                      : 0.0;
    for (int c = 0; c < C; ++c)
      if (spec.covariates[static_cast<std::size_t>(c)].group == VarGroup::Pt)
        patient_cov[static_cast<std::size_t>(p)].push_back(
            detail::draw_covariate(spec.covariates[static_cast<std::size_t>(c)], rng));
      else
        patient_cov[static_cast<std::size_t>(p)].push_back({});
    for (int r = 0; r < count; ++r) patient_of_row.push_back(p);
  }
  const std::size_t n = patient_of_row.size();

  // row pass A: HP covariates; the per-row stream continues later with the
  // outcome draw and feature noise
  std::uint64_t row_root = derive_seed(spec.seed, "row");
  std::vector<Rng> row_rng;
  row_rng.reserve(n);
  Eigen::MatrixXd signal(n, std::max(C, 1));
  std::vector<std::vector<detail::CovariateDraw>> row_cov(n);
  std::vector<double> logits(n);
  for (std::size_t r = 0; r < n; ++r) {
    Rng rng(derive_seed(row_root, static_cast<std::uint64_t>(r)));
    int p = patient_of_row[r];
    row_cov[r].resize(static_cast<std::size_t>(C));
    double logit = patient_intercept[static_cast<std::size_t>(p)];
    for (int c = 0; c < C; ++c) {
      const SynthCovariate& cov = spec.covariates[static_cast<std::size_t>(c)];
      detail::CovariateDraw d = cov.group == VarGroup::Pt
                                    ? patient_cov[static_cast<std::size_t>(p)]
                                                 [static_cast<std::size_t>(c)]
                                    : detail::draw_covariate(cov, rng);
      row_cov[r][static_cast<std::size_t>(c)] = d;
      signal(static_cast<Eigen::Index>(r), c) = d.signal;
      logit += cov.effect_on_outcome * d.signal;
    }
    logits[r] = logit;
    row_rng.push_back(rng);
  }

  double alpha = detail::solve_intercept(logits, spec.prevalence);

  // row pass B: outcome draw, then feature noise, from the same streams
  GroundTruth truth;
  truth.intercept = alpha;
  truth.directions = directions;
  truth.covariate_signal = C > 0 ? signal : Eigen::MatrixXd(n, 0);
  truth.outcome_probability.resize(static_cast<Eigen::Index>(n));
  truth.feature_means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), D);

  std::vector<double> outcome(n);
  long long case_count = 0;
  for (std::size_t r = 0; r < n; ++r) {
    double prob = sigmoid(alpha + logits[r]);
    truth.outcome_probability(static_cast<Eigen::Index>(r)) = prob;
    outcome[r] = row_rng[r].u01() < prob ? 1.0 : 0.0;
    case_count += outcome[r] == 1.0;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(D);
    if (outcome[r] == 1.0 && spec.direct_signal > 0)
      mean += spec.direct_signal * directions.row(0);
    for (int c = 0; c < C; ++c) {
      double leak = spec.covariates[static_cast<std::size_t>(c)].leak_strength;
      if (leak > 0)
        mean += leak * signal(static_cast<Eigen::Index>(r), c) *
                directions.row(c + 1);
    }
    truth.feature_means.row(static_cast<Eigen::Index>(r)) = mean;
  }
  truth.achieved_prevalence =
      static_cast<double>(case_count) / static_cast<double>(n);

  Eigen::MatrixXd features(n, D);
  parallel_for(n, [&](std::size_t r) {
    Rng rng = row_rng[r];  // continue the per-row stream
    for (int j = 0; j < D; ++j)
      features(static_cast<Eigen::Index>(r), j) =
          truth.feature_means(static_cast<Eigen::Index>(r), j) +
          spec.noise_sd * rng.normal();
  });

  // assemble the dataset
  std::vector<VariableSpec> vars;
  vars.push_back({spec.outcome_name, VarKind::Binary, VarGroup::Outcome, ""});
  for (const auto& cov : spec.covariates)
    vars.push_back({cov.name, cov.kind, cov.group, ""});
  Schema schema(vars);

  std::vector<Column> cols(schema.size());
  Column& out_col = cols[0];
  out_col.num = outcome;
  out_col.missing.assign(n, 0);
  for (int c = 0; c < C; ++c) {
    const SynthCovariate& cov = spec.covariates[static_cast<std::size_t>(c)];
    Column& col = cols[static_cast<std::size_t>(c) + 1];
    col.missing.assign(n, 0);
    if (cov.kind == VarKind::Categorical) {
      col.str.resize(n);
      for (std::size_t r = 0; r < n; ++r)
        col.str[r] =
            "L" + std::to_string(row_cov[r][static_cast<std::size_t>(c)].level_index + 1);
    } else {
      col.num.resize(n);
      for (std::size_t r = 0; r < n; ++r)
        col.num[r] = row_cov[r][static_cast<std::size_t>(c)].raw;
    }
    if (cov.missing_rate > 0) {
      Rng rng(derive_seed(spec.seed, "missing:" + cov.name));
      for (std::size_t r = 0; r < n; ++r)
        if (rng.u01() < cov.missing_rate) col.missing[r] = 1;
    }
  }

  std::vector<std::string> row_ids(n), patient_ids(n);
  for (std::size_t r = 0; r < n; ++r) {
    row_ids[r] = "r" + std::to_string(r);
    patient_ids[r] = "p" + std::to_string(patient_of_row[r]);
  }

  SynthResult result{Dataset(schema, std::move(row_ids), std::move(patient_ids),
                             std::move(cols), std::move(features)),
                     std::move(truth)};
  return result;
}

// ---------------------------------------------------------------------------
// Bayes-optimal AUC oracle

enum class OracleCohort { Full, Matched };

// Monte Carlo estimate of the Bayes-optimal AUC of the feature -> outcome
// problem under the generative model. Requires every leaking covariate to be
// discrete (binary or categorical), which makes the class-conditional
// feature law a finite Gaussian mixture with a closed-form likelihood ratio;
// the mixture weights are estimated from the simulated joint draw.
//
// Full: AUC of the likelihood-ratio score over the marginal population.
// Matched: each simulated case is paired with a control sharing its leak
// configuration (the idealized perfectly matched cohort); under a leak-only
// spec this conditional AUC is 0.5 by construction.
inline double oracle_bayes_auc(const ConfoundSpec& spec, OracleCohort which,
                               int draws = 1000000,
                               std::uint64_t seed_override = 0) {
  detail::validate_spec(spec);
  const int C = static_cast<int>(spec.covariates.size());

  std::vector<int> leaking;
  for (int c = 0; c < C; ++c) {
    const SynthCovariate& cov = spec.covariates[static_cast<std::size_t>(c)];
    if (cov.leak_strength <= 0) continue;
    if (cov.kind == VarKind::Continuous)
      throw DataError(
          "oracle_bayes_auc requires discrete leaking covariates (closed-form "
          "Gaussian mixture)");
    leaking.push_back(c);
  }

  // signal support per leaking covariate
  std::vector<std::vector<double>> support;
  std::size_t n_combos = 1;
  for (int c : leaking) {
    const SynthCovariate& cov = spec.covariates[static_cast<std::size_t>(c)];
    std::vector<double> values;
    if (cov.kind == VarKind::Binary) {
      values = {0.0, 1.0};
    } else {
      int L = cov.n_levels;
      double sd = std::sqrt((static_cast<double>(L) * L - 1.0) / 12.0);
      for (int l = 0; l < L; ++l)
        values.push_back((static_cast<double>(l) -
                          (static_cast<double>(L) - 1.0) / 2.0) /
                         sd);
    }
    support.push_back(values);
    n_combos *= values.size();
    if (n_combos > 4096)
      throw DataError("oracle_bayes_auc: leak configuration space too large");
  }

  // working coordinates: u0 plus one axis per leaking covariate
  const int k = 1 + static_cast<int>(leaking.size());
  auto combo_mean = [&](int y, const std::vector<int>& combo) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(k);
    if (y == 1) m(0) = spec.direct_signal;
    for (std::size_t i = 0; i < leaking.size(); ++i)
      m(static_cast<Eigen::Index>(i) + 1) =
          spec.covariates[static_cast<std::size_t>(leaking[i])].leak_strength *
          support[i][static_cast<std::size_t>(combo[i])];
    return m;
  };

  std::vector<std::vector<int>> combos;
  {
    std::vector<int> cur(leaking.size(), 0);
    for (;;) {
      combos.push_back(cur);
      std::size_t pos = 0;
      while (pos < cur.size()) {
        if (++cur[pos] < static_cast<int>(support[pos].size())) break;
        cur[pos++] = 0;
      }
      if (pos == cur.size()) break;
      if (cur.empty()) break;
    }
    if (combos.empty()) combos.push_back({});
  }
  std::map<std::vector<int>, std::size_t> combo_index;
  for (std::size_t i = 0; i < combos.size(); ++i) combo_index[combos[i]] = i;

  std::uint64_t seed =
      seed_override ? seed_override : derive_seed(spec.seed, "oracle");
  Rng rng(seed);

  // joint simulation: covariates -> logit; intercept solved on a pilot draw
  auto draw_logit_and_combo = [&](Rng& r, std::vector<int>& combo) {
    double logit =
        spec.patient_intercept_sd > 0 ? spec.patient_intercept_sd * r.normal() : 0.0;
    combo.assign(leaking.size(), 0);
    for (int c = 0; c < C; ++c) {
      const SynthCovariate& cov = spec.covariates[static_cast<std::size_t>(c)];
      detail::CovariateDraw d = detail::draw_covariate(cov, r);
      logit += cov.effect_on_outcome * d.signal;
      for (std::size_t i = 0; i < leaking.size(); ++i)
        if (leaking[i] == c)
          combo[i] = cov.kind == VarKind::Binary
                         ? static_cast<int>(d.raw)
                         : d.level_index;
    }
    return logit;
  };

  const int pilot = 200000;
  std::vector<double> pilot_logits(static_cast<std::size_t>(pilot));
  {
    Rng pr(derive_seed(seed, "pilot"));
    std::vector<int> combo;
    for (int i = 0; i < pilot; ++i)
      pilot_logits[static_cast<std::size_t>(i)] = draw_logit_and_combo(pr, combo);
  }
  double alpha = detail::solve_intercept(pilot_logits, spec.prevalence);

  // weights P(combo | y) from the simulated joint
  Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(combos.size()));
  {
    Rng wr(derive_seed(seed, "weights"));
    std::vector<int> combo;
    for (int i = 0; i < pilot; ++i) {
      double logit = draw_logit_and_combo(wr, combo);
      double p = sigmoid(alpha + logit);
      std::size_t idx = combo_index.at(combo);
      weight(1, static_cast<Eigen::Index>(idx)) += p;
      weight(0, static_cast<Eigen::Index>(idx)) += 1.0 - p;
    }
    for (int y = 0; y < 2; ++y) weight.row(y) /= weight.row(y).sum();
  }

  const double inv_two_var = 0.5 / (spec.noise_sd * spec.noise_sd);
  std::vector<Eigen::VectorXd> means0, means1;
  for (const auto& combo : combos) {
    means0.push_back(combo_mean(0, combo));
    means1.push_back(combo_mean(1, combo));
  }
  auto log_lr = [&](const Eigen::VectorXd& z) {
    double m1 = -std::numeric_limits<double>::infinity();
    double m0 = m1;
    std::vector<double> e1(combos.size()), e0(combos.size());
    for (std::size_t i = 0; i < combos.size(); ++i) {
      double w1 = weight(1, static_cast<Eigen::Index>(i));
      double w0 = weight(0, static_cast<Eigen::Index>(i));
      e1[i] = w1 > 0 ? std::log(w1) - (z - means1[i]).squaredNorm() * inv_two_var
                     : -std::numeric_limits<double>::infinity();
      e0[i] = w0 > 0 ? std::log(w0) - (z - means0[i]).squaredNorm() * inv_two_var
                     : -std::numeric_limits<double>::infinity();
      m1 = std::max(m1, e1[i]);
      m0 = std::max(m0, e0[i]);
    }
    double s1 = 0.0, s0 = 0.0;
    for (std::size_t i = 0; i < combos.size(); ++i) {
      if (std::isfinite(e1[i])) s1 += std::exp(e1[i] - m1);
      if (std::isfinite(e0[i])) s0 += std::exp(e0[i] - m0);
    }
    return (m1 + std::log(s1)) - (m0 + std::log(s0));
  };

  if (which == OracleCohort::Full) {
    std::vector<double> scores(static_cast<std::size_t>(draws));
    std::vector<int> labels(static_cast<std::size_t>(draws));
    std::vector<int> combo;
    Eigen::VectorXd z(k);
    for (int i = 0; i < draws; ++i) {
      double logit = draw_logit_and_combo(rng, combo);
      int y = rng.u01() < sigmoid(alpha + logit) ? 1 : 0;
      std::size_t idx = combo_index.at(combo);
      const Eigen::VectorXd& m = y == 1 ? means1[idx] : means0[idx];
      for (int j = 0; j < k; ++j) z(j) = m(j) + spec.noise_sd * rng.normal();
      scores[static_cast<std::size_t>(i)] = log_lr(z);
      labels[static_cast<std::size_t>(i)] = y;
    }
    return auc_point(scores, labels);
  }

  // matched: pair each simulated case with a control sharing its combo
  double wins = 0.0;
  long long pairs = 0;
  std::vector<int> combo;
  Eigen::VectorXd z1(k), z0(k);
  for (int i = 0; i < draws; ++i) {
    double logit = draw_logit_and_combo(rng, combo);
    int y = rng.u01() < sigmoid(alpha + logit) ? 1 : 0;
    if (y != 1) continue;
    std::size_t idx = combo_index.at(combo);
    for (int j = 0; j < k; ++j) {
      z1(j) = means1[idx](j) + spec.noise_sd * rng.normal();
      z0(j) = means0[idx](j) + spec.noise_sd * rng.normal();
    }
    double s1 = log_lr(z1), s0 = log_lr(z0);
    wins += s1 > s0 ? 1.0 : (s1 == s0 ? 0.5 : 0.0);
    ++pairs;
  }
  if (pairs == 0) throw NumericError("oracle_bayes_auc: no cases drawn");
  return wins / static_cast<double>(pairs);
}

// ---------------------------------------------------------------------------
// Spec (de)serialization and dataset export

inline ConfoundSpec confound_spec_from_json(const nlohmann::json& j) {
  ConfoundSpec spec;
  spec.n_patients = j.at("n_patients").get<int>();
  if (j.contains("rows_per_patient")) {
    spec.rows_per_patient_min = j["rows_per_patient"].at(0).get<int>();
    spec.rows_per_patient_max = j["rows_per_patient"].at(1).get<int>();
  }
  spec.prevalence = j.at("prevalence").get<double>();
  spec.direct_signal = j.value("direct_signal", 0.0);
  spec.feature_dim = j.at("feature_dim").get<int>();
  spec.noise_sd = j.value("noise_sd", 1.0);
  spec.patient_intercept_sd = j.value("patient_intercept_sd", 0.2);
  spec.outcome_name = j.value("outcome_name", std::string("outcome"));
  spec.seed = j.value("seed", 0ull);
  if (j.contains("covariates"))
    for (const auto& c : j["covariates"]) {
      SynthCovariate cov;
      cov.name = c.at("name").get<std::string>();
      cov.kind = var_kind_from_string(c.value("kind", std::string("binary")));
      cov.group = var_group_from_string(c.value("group", std::string("pt")));
      cov.effect_on_outcome = c.value("effect_on_outcome", 0.0);
      cov.leak_strength = c.value("leak_strength", 0.0);
      cov.n_levels = c.value("n_levels", 4);
      cov.missing_rate = c.value("missing_rate", 0.0);
      spec.covariates.push_back(std::move(cov));
    }
  return spec;
}

inline nlohmann::json confound_spec_to_json(const ConfoundSpec& spec) {
  nlohmann::json j{{"n_patients", spec.n_patients},
                   {"rows_per_patient",
                    {spec.rows_per_patient_min, spec.rows_per_patient_max}},
                   {"prevalence", spec.prevalence},
                   {"direct_signal", spec.direct_signal},
                   {"feature_dim", spec.feature_dim},
                   {"noise_sd", spec.noise_sd},
                   {"patient_intercept_sd", spec.patient_intercept_sd},
                   {"outcome_name", spec.outcome_name},
                   {"seed", spec.seed}};
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& cov : spec.covariates)
    arr.push_back({{"name", cov.name},
                   {"kind", to_string(cov.kind)},
                   {"group", to_string(cov.group)},
                   {"effect_on_outcome", cov.effect_on_outcome},
                   {"leak_strength", cov.leak_strength},
                   {"n_levels", cov.n_levels},
                   {"missing_rate", cov.missing_rate}});
  j["covariates"] = arr;
  return j;
}

inline ConfoundSpec confound_spec_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open synth spec: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("synth spec " + path + ": " + e.what());
  }
  return confound_spec_from_json(j);
}

// Writes data.csv (ingestible by load_table) and schema.json into `dir`.
inline void write_synth_dataset(const SynthResult& result,
                                const std::string& dir, char delimiter = ',') {
  std::filesystem::create_directories(dir);
  const Dataset& ds = result.data;

  {
    std::ofstream schema_out(std::filesystem::path(dir) / "schema.json");
    schema_out << ds.schema().to_json().dump(2) << "\n";
  }

  CsvWriter csv((std::filesystem::path(dir) / "data.csv").string(), delimiter);
  std::vector<std::string> header{"row_id", "patient_id"};
  for (const auto& v : ds.schema().variables()) header.push_back(v.name);
  for (std::size_t dmn = 0; dmn < ds.feature_dim(); ++dmn)
    header.push_back("f" + std::to_string(dmn));
  csv.write_row(header);

  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    std::vector<std::string> cells{ds.row_ids()[r], ds.patient_ids()[r]};
    for (std::size_t c = 0; c < ds.schema().size(); ++c) {
      if (ds.is_missing(r, c)) {
        cells.push_back("");
      } else if (ds.schema().at(c).kind == VarKind::Categorical) {
        cells.push_back(ds.level(r, c));
      } else {
        cells.push_back(format_double(ds.value(r, c)));
      }
    }
    for (std::size_t dmn = 0; dmn < ds.feature_dim(); ++dmn)
      cells.push_back(format_double(
          ds.features()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(dmn))));
    csv.write_row(cells);
  }
}

}  // namespace confaudit
