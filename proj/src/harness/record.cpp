#include <algorithm>
#include <charconv>
#include <fstream>

#include "tomolab/errors.hpp"
#include "tomolab/harness.hpp"

namespace tomolab::harness {

namespace {

// Shortest round-trip representation, so files are stable across platforms.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json vec(const RVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec(m.row(r).transpose()));
  return rows;
}

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / name).string());
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

json record_to_json(const RunRecord& r) {
  const RMatrix& cov = r.final_summary.covariance;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(cov);
  std::vector<double> principal(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::reverse(principal.begin(), principal.end());
  const StepRow& last = r.rows.back();
  return json{
      {"mode", r.mode},
      {"basis_id", r.basis_id},
      {"labels", r.labels},
      {"n_steps", r.rows.size()},
      {"failed", r.failed},
      {"failed_step", r.failed_step},
      {"failure", r.failure},
      {"n_resamples", r.n_resamples},
      {"initial_loss", r.rows.front().loss},
      {"final",
       {{"mean", vec(r.final_summary.mean.coords)},
        {"truth", vec(last.truth)},
        {"loss", last.loss},
        {"covariance", mat(cov)},
        {"cov_trace", cov.trace()},
        {"principal_values", principal},
        {"ess", r.final_summary.ess},
        {"total_log_norm", r.final_summary.total_log_norm},
        {"mahalanobis2", r.final_mahalanobis2},
        {"truth_in_ellipsoid", r.truth_in_ellipsoid}}},
      {"config", r.config},
  };
}

json risk_to_json(const RiskRecord& r) {
  json curves = json::array();
  for (const auto& c : r.curves) {
    curves.push_back({{"label", c.label}, {"mean_loss", c.mean_loss}, {"n_failed", c.n_failed}});
  }
  return json{{"curves", curves}, {"config", r.config}};
}

void write_run(const RunRecord& r, const std::filesystem::path& dir) {
  open_out(dir, "run_record.json") << record_to_json(r).dump(2) << '\n';

  auto steps = open_out(dir, "steps.csv");
  steps << "step,time,design,n_meas,n_success,loss,cov_trace,ess,log_norm,eta_mean,resampled";
  for (const auto& l : r.labels) steps << ",est_" << l;
  for (const auto& l : r.labels) steps << ",truth_" << l;
  steps << '\n';
  for (const auto& row : r.rows) {
    steps << row.step << ',' << num(row.time) << ',' << csv_field(row.design) << ',' << row.n_meas << ','
          << row.n_success << ',' << num(row.loss) << ',' << num(row.cov_trace) << ',' << num(row.ess) << ','
          << num(row.log_norm) << ',' << num(row.eta_mean) << ',' << (row.resampled ? 1 : 0);
    for (Eigen::Index j = 0; j < row.est_mean.size(); ++j) steps << ',' << num(row.est_mean[j]);
    for (Eigen::Index j = 0; j < row.truth.size(); ++j) steps << ',' << num(row.truth[j]);
    steps << '\n';
  }

  auto cov = open_out(dir, "covariance.csv");
  const RMatrix& c = r.final_summary.covariance;
  for (std::size_t j = 0; j < r.labels.size(); ++j) cov << (j ? "," : "") << r.labels[j];
  cov << '\n';
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) cov << (j ? "," : "") << num(c(i, j));
    cov << '\n';
  }

  const auto& conf = r.config.at("model");
  if (conf.at("kind") == "channel") {
    const auto top = principal_components(r.final_summary, 1).front();
    const std::size_t d = conf.at("dim").get<std::size_t>();
    const BasisPtr basis = make_setup(ModelSpec{ModelKind::channel, d, conf.at("basis").get<std::string>()}).basis;
    const CMatrix m = basis->matrix(top.direction.coords);
    auto pc = open_out(dir, "principal_channel.csv");
    pc << "# variance " << num(top.variance) << '\n' << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        pc << i << ',' << j << ',' << num(m(i, j).real()) << ',' << num(m(i, j).imag()) << '\n';
      }
    }
  }
}

void write_risk(const RiskRecord& r, const std::filesystem::path& dir) {
  open_out(dir, "risk.json") << risk_to_json(r).dump(2) << '\n';
  auto out = open_out(dir, "risk.csv");
  out << "step";
  for (const auto& c : r.curves) out << ',' << csv_field(c.label);
  out << '\n';
  const std::size_t n = r.curves.empty() ? 0 : r.curves.front().mean_loss.size();
  for (std::size_t k = 0; k < n; ++k) {
    out << k;
    for (const auto& c : r.curves) out << ',' << num(c.mean_loss[k]);
    out << '\n';
  }
}

void write_samples(const SampleDump& dump, const std::filesystem::path& dir) {
  auto out = open_out(dir, "samples.csv");
  for (std::size_t j = 0; j < dump.labels.size(); ++j) out << (j ? "," : "") << dump.labels[j];
  out << '\n';
  for (Eigen::Index i = 0; i < dump.draws.rows(); ++i) {
    for (Eigen::Index j = 0; j < dump.draws.cols(); ++j) out << (j ? "," : "") << num(dump.draws(i, j));
    out << '\n';
  }
}

}  // namespace tomolab::harness
