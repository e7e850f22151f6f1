#include "flatgp/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "flatgp/dataset.hpp"
#include "flatgp/doftools.hpp"
#include "flatgp/error.hpp"
#include "flatgp/flatlimit.hpp"
#include "flatgp/gp.hpp"
#include "flatgp/numerics.hpp"
#include "flatgp/parallel.hpp"

namespace flatgp::cli {

using json = nlohmann::json;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  bool partial = false;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct Result {
  json summary = json::object();
  Table table;
};

std::string num(double v) { return format_double(v); }

std::string status_of(bool ok, const std::string& error) {
  if (ok) return "ok";
  auto colon = error.find(':');
  return colon == std::string::npos ? error : error.substr(0, colon);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad number '" + item + "'");
    }
  }
  return out;
}

// "x1,x2;x1,x2;..." with d coordinates per point.
Design parse_points(const std::string& s, Eigen::Index d) {
  std::vector<std::vector<double>> pts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto p = parse_list(item);
    if (static_cast<Eigen::Index>(p.size()) != d)
      throw Error(ErrorCode::InvalidArgument, "query point '" + item + "' has wrong dimension");
    pts.push_back(p);
  }
  if (pts.empty()) throw Error(ErrorCode::InvalidArgument, "no query points");
  PointMatrix m(static_cast<Eigen::Index>(pts.size()), d);
  for (size_t i = 0; i < pts.size(); ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = pts[i][j];
  return Design(std::move(m));
}

Kernel make_kernel(const ExperimentConfig& c) {
  if (c.kernel == "gaussian") return Kernel::gaussian(c.eps, c.gamma);
  if (c.kernel == "exponential") return Kernel::exponential(c.eps, c.gamma);
  if (c.kernel == "matern") return Kernel::matern(c.nu, c.eps, c.gamma);
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + c.kernel + "'");
}

// "<kernel>[*gain][|degree]" with kernel in zero, phs<r>, poly<m>.
SemiParametricModel parse_model(const std::string& spec) {
  std::string s = spec;
  int degree = -1;
  if (auto bar = s.find('|'); bar != std::string::npos) {
    degree = static_cast<int>(parse_list(s.substr(bar + 1)).at(0));
    s = s.substr(0, bar);
  }
  double gain = 1.0;
  if (auto star = s.find('*'); star != std::string::npos) {
    gain = parse_list(s.substr(star + 1)).at(0);
    s = s.substr(0, star);
  }
  Kernel k;
  if (s == "zero") k = Kernel::zero();
  else if (s.rfind("phs", 0) == 0) k = Kernel::polyharmonic(std::stoi(s.substr(3)), gain);
  else if (s.rfind("poly", 0) == 0) k = Kernel::polynomial(std::stoi(s.substr(4)), gain);
  else throw Error(ErrorCode::InvalidArgument, "unknown model kernel '" + s + "'");
  return {k, Basis::monomials(degree)};
}

Dataset load_data(const ExperimentConfig& c) {
  if (!c.data.empty()) return parse_dataset(c.data, c.target);
  if (c.n < 1 || c.dim < 1) throw Error(ErrorCode::InvalidArgument, "--n and --dim must be >= 1");
  // Synthetic design: uniform on [0,1]^d, y = sin(2 pi x_1) + 0.1 noise.
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit;
  std::normal_distribution<double> normal;
  PointMatrix P(c.n, c.dim);
  for (Eigen::Index i = 0; i < P.size(); ++i) P.data()[i] = unit(rng);
  if (c.dim == 1) std::sort(P.data(), P.data() + P.size());
  Dataset ds;
  ds.y.resize(c.n);
  for (int i = 0; i < c.n; ++i) ds.y(i) = std::sin(2.0 * M_PI * P(i, 0)) + 0.1 * normal(rng);
  for (int j = 0; j < c.dim; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
  ds.target_name = "y";
  ds.X = Design(std::move(P));
  return ds;
}

Design default_query(const ExperimentConfig& c, const Design& X) {
  if (!c.query.empty()) return parse_points(c.query, X.dim());
  if (X.dim() != 1) return X;
  double lo = X.points().minCoeff(), hi = X.points().maxCoeff();
  Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(50, lo, hi);
  return Design::from_vector(q);
}

std::vector<double> require_grid(const std::string& spec, const char* flag) {
  if (spec.empty()) throw Error(ErrorCode::InvalidArgument, std::string(flag) + " is required");
  return parse_log_grid(spec);
}

json config_json(const ExperimentConfig& c) {
  return {{"command", c.command}, {"data", c.data},         {"target", c.target},
          {"kernel", c.kernel},   {"nu", c.nu},             {"eps", c.eps},
          {"eps_grid", c.eps_grid}, {"gamma", c.gamma},     {"gamma_grid", c.gamma_grid},
          {"p", c.p},             {"gamma0", c.gamma0},     {"sigma2", c.sigma2},
          {"nugget", c.nugget},   {"dof", c.dof},           {"query", c.query},
          {"xa", c.xa},           {"xb", c.xb},             {"model_a", c.model_a},
          {"model_b", c.model_b}, {"trials", c.trials},     {"n", c.n},
          {"dim", c.dim},         {"seed", c.seed},         {"threads", max_threads()}};
}

std::vector<std::string> point_cells(const Design& X, Eigen::Index i) {
  std::vector<std::string> out;
  for (double v : X.point(i)) out.push_back(num(v));
  return out;
}

std::vector<std::string> point_header(const Dataset& ds) { return ds.feature_names; }

Result cmd_fit(const ExperimentConfig& c) {
  Dataset ds = load_data(c);
  Kernel k = make_kernel(c);
  Result res;
  GpPosterior post = gp_posterior(k, ds.X, ds.y, c.sigma2, ds.X, c.nugget);
  SmootherMatrix M = gp_smoother(k, ds.X, c.sigma2, c.nugget);
  double s2 = c.sigma2 + c.gamma * c.nugget;
  res.summary = {{"n", ds.X.size()},
                 {"dim", ds.X.dim()},
                 {"dof", dof(M)},
                 {"loo_mse", loo_mse(M, ds.y)},
                 {"loo_nll", loo_nll(M, ds.y, s2)},
                 {"sure", sure(M, ds.y, s2)},
                 {"nlml", nlml(k, ds.X, ds.y, c.sigma2, c.nugget)}};
  res.table.header = point_header(ds);
  for (auto h : {"y", "fitted", "var", "status"}) res.table.header.push_back(h);
  for (Eigen::Index i = 0; i < ds.X.size(); ++i) {
    auto row = point_cells(ds.X, i);
    row.insert(row.end(), {num(ds.y(i)), num(post.mean(i)), num(post.var(i)), "ok"});
    res.table.add(row);
  }
  return res;
}

Result cmd_predict(const ExperimentConfig& c) {
  Dataset ds = load_data(c);
  Design q = default_query(c, ds.X);
  Result res;
  Eigen::VectorXd mean, var;
  if (!c.model_a.empty()) {
    SemiParametricModel m = parse_model(c.model_a);
    SpmFit fit = fit_spm(m, ds.X, ds.y, c.sigma2);
    mean = fit.mean(q);
    var = fit.var(q);
    res.summary["model"] = m.describe();
  } else {
    GpPosterior post = gp_posterior(make_kernel(c), ds.X, ds.y, c.sigma2, q, c.nugget);
    mean = post.mean;
    var = post.var;
    res.summary["model"] = make_kernel(c).describe();
  }
  res.summary["queries"] = q.size();
  res.table.header = point_header(ds);
  for (auto h : {"mean", "var", "status"}) res.table.header.push_back(h);
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    auto row = point_cells(q, i);
    row.insert(row.end(), {num(mean(i)), num(var(i)), "ok"});
    res.table.add(row);
  }
  return res;
}

Result cmd_grid(const ExperimentConfig& c, bool criteria) {
  Dataset ds = load_data(c);
  auto eps = require_grid(c.eps_grid, "--eps-grid");
  auto gam = require_grid(c.gamma_grid, "--gamma-grid");
  Eigen::VectorXd y = criteria ? ds.y : Eigen::VectorXd();
  auto cells = evaluate_grid(make_kernel(c), ds.X, y, c.sigma2, eps, gam, c.nugget);
  Result res;
  res.table.header = {"eps", "gamma", "dof"};
  if (criteria) res.table.header.insert(res.table.header.end(), {"loo_mse", "loo_nll", "sure"});
  res.table.header.push_back("status");
  json best = json::object();
  const GridCell* arg[3] = {nullptr, nullptr, nullptr};
  auto value = [](const GridCell& g, int k) {
    return k == 0 ? g.criteria.loo_mse : (k == 1 ? g.criteria.loo_nll : g.criteria.sure);
  };
  for (const auto& cell : cells) {
    std::vector<std::string> row = {num(cell.eps), num(cell.gamma), num(cell.dof)};
    if (criteria)
      row.insert(row.end(), {num(cell.criteria.loo_mse), num(cell.criteria.loo_nll), num(cell.criteria.sure)});
    row.push_back(status_of(cell.ok, cell.error));
    res.table.add(row);
    res.table.partial = res.table.partial || !cell.ok;
    if (criteria && cell.ok)
      for (int k = 0; k < 3; ++k)
        if (!arg[k] || value(cell, k) < value(*arg[k], k)) arg[k] = &cell;
  }
  res.summary["cells"] = cells.size();
  if (criteria) {
    const char* names[3] = {"loo_mse", "loo_nll", "sure"};
    for (int k = 0; k < 3; ++k)
      if (arg[k]) best[names[k]] = {{"eps", arg[k]->eps}, {"gamma", arg[k]->gamma}, {"dof", arg[k]->dof}};
    res.summary["argmin"] = best;
  }
  return res;
}

Result cmd_isofreedom(const ExperimentConfig& c) {
  Dataset ds = load_data(c);
  auto eps = require_grid(c.eps_grid, "--eps-grid");
  auto targets = parse_list(c.dof);
  if (targets.empty()) throw Error(ErrorCode::InvalidArgument, "--dof is required");
  Result res;
  res.table.header = {"m", "eps", "gamma", "dof", "residual", "status"};
  json curves = json::array();
  Kernel k = make_kernel(c);
  for (double m : targets) {
    std::vector<IsofreedomPoint> pts;
    std::vector<double> ok_eps, ok_gamma;
    for (double e : eps) {
      try {
        IsofreedomPoint pt = isofreedom_gamma(k.with_epsilon(e), ds.X, c.sigma2, m);
        res.table.add({num(m), num(e), num(pt.gamma), num(pt.dof), num(pt.residual), "ok"});
        pts.push_back(pt);
      } catch (const Error& err) {
        res.table.add({num(m), num(e), "", "", "", std::string(to_string(err.code()))});
        res.table.partial = true;
      }
    }
    for (size_t i = pts.size() / 2; i < pts.size(); ++i) {
      ok_eps.push_back(pts[i].eps);
      ok_gamma.push_back(pts[i].gamma);
    }
    double slope = loglog_slope(ok_eps, ok_gamma);
    curves.push_back({{"m", m}, {"points", pts.size()}, {"slope", std::isfinite(slope) ? json(slope) : json()}});
  }
  res.summary["curves"] = curves;
  return res;
}

Result cmd_matched(const ExperimentConfig& c) {
  Dataset ds = load_data(c);
  Kernel k = make_kernel(c);
  MatchedApproximation ma = matched_approximation(k, ds.X, c.sigma2);
  Design q = default_query(c, ds.X);
  GpPosterior src = gp_posterior(k, ds.X, ds.y, c.sigma2, q);
  SpmFit fit = fit_spm(ma.target, ds.X, ds.y, c.sigma2);
  Eigen::VectorXd tm = fit.mean(q), tv = fit.var(q);
  Result res;
  res.summary = {{"source", k.describe()},       {"source_dof", ma.source_dof},
                 {"kind", ma.kind},              {"target", ma.target.describe()},
                 {"target_gain", ma.target_gain}, {"achieved_dof", ma.achieved_dof}};
  res.table.header = point_header(ds);
  for (auto h : {"source_mean", "source_var", "target_mean", "target_var", "status"})
    res.table.header.push_back(h);
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    auto row = point_cells(q, i);
    row.insert(row.end(), {num(src.mean(i)), num(src.var(i)), num(tm(i)), num(tv(i)), "ok"});
    res.table.add(row);
  }
  return res;
}

Result cmd_equiv(const ExperimentConfig& c) {
  if (c.model_a.empty() || c.model_b.empty())
    throw Error(ErrorCode::InvalidArgument, "--model-a and --model-b are required");
  Dataset ds = load_data(c);
  SemiParametricModel a = parse_model(c.model_a), b = parse_model(c.model_b);
  EquivalenceCheck chk = check_pred_equiv(a, b, ds.X, c.trials, 1e-8, c.seed);
  Result res;
  res.summary = {{"model_a", a.describe()},
                 {"model_b", b.describe()},
                 {"equivalent", chk.equivalent},
                 {"trials", chk.trials},
                 {"max_mean_dev", chk.max_mean_dev},
                 {"max_var_dev", chk.max_var_dev},
                 {"max_smoother_dev", chk.max_smoother_dev}};
  res.table.header = {"quantity", "max_rel_dev", "status"};
  res.table.add({"mean", num(chk.max_mean_dev), "ok"});
  res.table.add({"var", num(chk.max_var_dev), "ok"});
  res.table.add({"smoother", num(chk.max_smoother_dev), "ok"});
  return res;
}

Result cmd_converge(const ExperimentConfig& c) {
  Dataset ds = load_data(c);
  auto eps = require_grid(c.eps_grid, "--eps-grid");
  ScaledKernelFamily fam{make_kernel(c), c.p, c.gamma0};
  ConvergenceOptions opts;
  opts.sigma2 = c.sigma2;
  opts.seed = c.seed;
  if (!c.data.empty()) opts.responses = {ds.y};
  EquivalenceReport rep = convergence_study(fam, ds.X, default_query(c, ds.X), eps, opts);
  Result res;
  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(); };
  res.summary = {{"limit", to_string(rep.limit.kind)},
                 {"limit_model", rep.limit.model.describe()},
                 {"mean_slope", finite(rep.mean_slope)},
                 {"var_slope", finite(rep.var_slope)},
                 {"smoother_slope", finite(rep.smoother_slope)},
                 {"slope", finite(rep.limit.kind == LimitKind::Interpolation ? rep.smoother_slope
                                                                             : rep.mean_slope)},
                 {"pass", rep.pass},
                 {"warnings", rep.warnings}};
  res.table.header = {"eps", "mean_dev", "var_dev", "smoother_dev", "scale", "status"};
  for (const auto& row : rep.rows) {
    res.table.add({num(row.eps), num(row.mean_dev), num(row.var_dev), num(row.smoother_dev),
                   num(row.scale), status_of(row.ok, row.error)});
    res.table.partial = res.table.partial || !row.ok;
  }
  return res;
}

Result cmd_pred_curve(const ExperimentConfig& c) {
  Dataset ds = load_data(c);
  auto gam = require_grid(c.gamma_grid, "--gamma-grid");
  if (c.xa.empty() || c.xb.empty()) throw Error(ErrorCode::InvalidArgument, "--xa and --xb are required");
  Design a = parse_points(c.xa, ds.X.dim()), b = parse_points(c.xb, ds.X.dim());
  auto curve = prediction_curve(make_kernel(c), ds.X, ds.y, c.sigma2, gam, a.point(0), b.point(0));
  auto anchors = polynomial_anchors(ds.X, ds.y, 6, a.point(0), b.point(0));
  Result res;
  res.table.header = {"kind", "gamma", "degree", "pred_a", "pred_b", "status"};
  for (const auto& pt : curve) {
    res.table.add({"curve", num(pt.gamma), "", num(pt.pred_a), num(pt.pred_b), status_of(pt.ok, pt.error)});
    res.table.partial = res.table.partial || !pt.ok;
  }
  for (const auto& an : anchors)
    res.table.add({"anchor", "", std::to_string(an.degree), num(an.pred_a), num(an.pred_b), "ok"});
  res.summary = {{"curve_points", curve.size()}, {"anchors", anchors.size()}};
  return res;
}

// Largest change of dof per decade of gamma over the tail of a log-spaced grid.
double max_change_per_decade(const std::vector<double>& gamma, const std::vector<double>& d,
                             const std::vector<bool>& ok, double from) {
  double worst = 0.0;
  for (size_t i = 1; i < gamma.size(); ++i) {
    if (gamma[i - 1] < from || !ok[i] || !ok[i - 1]) continue;
    double decades = std::log10(gamma[i] / gamma[i - 1]);
    if (decades > 0) worst = std::max(worst, std::abs(d[i] - d[i - 1]) / decades);
  }
  return worst;
}

Result cmd_nugget(const ExperimentConfig& c) {
  Dataset ds = load_data(c);
  auto gam = require_grid(c.gamma_grid, "--gamma-grid");
  if (!(c.nugget > 0.0)) throw Error(ErrorCode::InvalidArgument, "--nugget must be positive");
  auto with = evaluate_grid(make_kernel(c), ds.X, ds.y, c.sigma2, {c.eps}, gam, c.nugget);
  auto without = evaluate_grid(make_kernel(c), ds.X, ds.y, c.sigma2, {c.eps}, gam, 0.0);
  Result res;
  res.table.header = {"gamma", "dof_nugget", "dof_plain", "loo_nll_nugget", "loo_nll_plain",
                      "status_nugget", "status_plain"};
  std::vector<double> g, dn, dp;
  std::vector<bool> okn, okp;
  for (size_t i = 0; i < gam.size(); ++i) {
    // The plain run counts only where K + (s2/gamma) I admits a Cholesky factor.
    bool plain_ok = without[i].ok;
    std::string plain_status = status_of(without[i].ok, without[i].error);
    try {
      gp_posterior(make_kernel(c).with_gain(gam[i]), ds.X, ds.y, c.sigma2, ds.X);
    } catch (const Error& e) {
      plain_ok = false;
      plain_status = std::string(to_string(e.code()));
    }
    res.table.add({num(gam[i]), num(with[i].dof), num(without[i].dof), num(with[i].criteria.loo_nll),
                   num(without[i].criteria.loo_nll), status_of(with[i].ok, with[i].error), plain_status});
    g.push_back(gam[i]);
    dn.push_back(with[i].dof);
    dp.push_back(without[i].dof);
    okn.push_back(with[i].ok);
    okp.push_back(plain_ok);
  }
  double scale = c.sigma2 / c.nugget;
  double from = 1e4 * scale;
  double change_nugget = max_change_per_decade(g, dn, okn, from);
  double change_plain = max_change_per_decade(g, dp, okp, from);
  res.summary = {{"nugget_scale_gamma", scale},
                 {"plateau_from_gamma", from},
                 {"max_change_per_decade_nugget", change_nugget},
                 {"max_change_per_decade_plain", change_plain},
                 {"nugget_plateau", change_nugget < 1e-3},
                 {"plain_plateau", change_plain < 1e-3}};
  return res;
}

void write_csv(std::ostream& os, const Table& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

void emit(const ExperimentConfig& c, json summary, const Table* table, std::ostream& out) {
  if (table && c.format == "json") {
    json rows = json::array();
    for (const auto& r : table->rows) {
      json o = json::object();
      for (size_t i = 0; i < r.size() && i < table->header.size(); ++i) {
        double v;
        auto [ptr, ec] = std::from_chars(r[i].data(), r[i].data() + r[i].size(), v);
        if (!r[i].empty() && ec == std::errc() && ptr == r[i].data() + r[i].size())
          o[table->header[i]] = v;
        else
          o[table->header[i]] = r[i];
      }
      rows.push_back(o);
    }
    summary["rows"] = rows;
  }
  if (!c.out.empty()) {
    std::ofstream(c.out + ".json") << summary.dump(2) << "\n";
    if (table) {
      std::ofstream csv(c.out + ".csv");
      write_csv(csv, *table);
    }
  }
  if (c.format == "csv" && table) write_csv(out, *table);
  else out << summary.dump(2) << "\n";
}

bool is_usage_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::MissingFile:
    case ErrorCode::RaggedRow:
    case ErrorCode::NonNumericCell:
    case ErrorCode::NonFiniteCell:
    case ErrorCode::EmptyDataset:
      return true;
    default:
      return false;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  CLI::App app{"Flat-limit analysis of Gaussian process regression", "flatgp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--data", c.data, "CSV with header; features then target");
  app.add_option("--target", c.target, "Target column name (default: last column)");
  app.add_option("--kernel", c.kernel, "gaussian | exponential | matern")
      ->check(CLI::IsMember({"gaussian", "exponential", "matern"}));
  app.add_option("--nu", c.nu, "Matern smoothness (0.5, 1.5, 2.5, 3.5)");
  app.add_option("--eps", c.eps, "Kernel width");
  app.add_option("--eps-grid", c.eps_grid, "Log grid a:b:k");
  app.add_option("--gamma", c.gamma, "Kernel gain");
  app.add_option("--gamma-grid", c.gamma_grid, "Log grid a:b:k");
  app.add_option("--p", c.p, "Gain exponent: gamma = gamma0 eps^-p");
  app.add_option("--gamma0", c.gamma0, "Gain prefactor");
  app.add_option("--sigma2", c.sigma2, "Noise variance");
  app.add_option("--nugget", c.nugget, "Nugget relative to the gain");
  app.add_option("--dof", c.dof, "Target degrees of freedom, comma-separated");
  app.add_option("--query", c.query, "Query points x1,x2;x1,x2;...");
  app.add_option("--xa", c.xa, "First prediction point");
  app.add_option("--xb", c.xb, "Second prediction point");
  app.add_option("--model-a", c.model_a, "Model <kernel>[*gain][|degree], kernel zero|phs<r>|poly<m>");
  app.add_option("--model-b", c.model_b, "Second model, same syntax");
  app.add_option("--trials", c.trials, "Random trials for equiv-check");
  app.add_option("--n", c.n, "Synthetic design size when --data is absent");
  app.add_option("--dim", c.dim, "Synthetic design dimension");
  app.add_option("--out", c.out, "Output prefix for <out>.json and <out>.csv");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--format", c.format, "What to print: json | csv")->check(CLI::IsMember({"csv", "json"}));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"fit", "GP fit at the data points with criteria"},
      {"predict", "Posterior mean and variance at query points"},
      {"dof-grid", "Degrees of freedom over an (eps, gamma) grid"},
      {"criteria-grid", "dof, LOO-MSE, LOO-NLL and SURE over an (eps, gamma) grid"},
      {"isofreedom", "Gain keeping dof fixed along an eps grid"},
      {"matched", "Flat-limit model with matching dof"},
      {"equiv-check", "Randomised prediction-equivalence check of two models"},
      {"converge", "Convergence of the scaled GP to its flat limit"},
      {"pred-curve", "Joint predictions at two points as the gain varies"},
      {"nugget-compare", "dof and LOO-NLL with and without a nugget"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? Success : Usage;
  }
  c.command = app.get_subcommands().front()->get_name();

  json summary = {{"config", config_json(c)}, {"seed", c.seed}};
  try {
    Result res;
    if (c.command == "fit") res = cmd_fit(c);
    else if (c.command == "predict") res = cmd_predict(c);
    else if (c.command == "dof-grid") res = cmd_grid(c, false);
    else if (c.command == "criteria-grid") res = cmd_grid(c, true);
    else if (c.command == "isofreedom") res = cmd_isofreedom(c);
    else if (c.command == "matched") res = cmd_matched(c);
    else if (c.command == "equiv-check") res = cmd_equiv(c);
    else if (c.command == "converge") res = cmd_converge(c);
    else if (c.command == "pred-curve") res = cmd_pred_curve(c);
    else if (c.command == "nugget-compare") res = cmd_nugget(c);
    summary["results"] = res.summary;
    summary["status"] = res.table.partial ? "partial" : "ok";
    emit(c, summary, &res.table, out);
    return res.table.partial ? NumericalFailure : Success;
  } catch (const Error& e) {
    summary["status"] = "error";
    summary["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    emit(c, summary, nullptr, out);
    err << e.what() << "\n";
    return is_usage_error(e.code()) ? Usage : NumericalFailure;
  }
}

}  // namespace flatgp::cli
