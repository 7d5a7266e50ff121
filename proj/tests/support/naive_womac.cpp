#include "naive_womac.hpp"

#include <cmath>

namespace womac::naive {
namespace {

// W_{-ij} as explicit row/column index lists.
struct Jackknife {
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> peers;
};

Jackknife jackknife(const Instance& data, Eigen::Index i, Eigen::Index j) {
  Jackknife out;
  for (Eigen::Index r = 0; r < data.reports.rows(); ++r) {
    if (r != i) out.rows.push_back(r);
  }
  for (Eigen::Index c = 0; c < data.reports.cols(); ++c) {
    if (c != j) out.peers.push_back(c);
  }
  return out;
}

double held_in_error(const Instance& data, const Jackknife& jk, Eigen::Index peer) {
  double total = 0.0;
  for (Eigen::Index r : jk.rows) {
    const double d = data.outcomes[r] - data.reports(r, peer);
    total += d * d;
  }
  return total;
}

}  // namespace

Eigen::MatrixXd reference_topk(const Instance& data, double k) {
  const Eigen::Index m = data.reports.rows();
  const Eigen::Index n = data.reports.cols();
  Eigen::MatrixXd t(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Jackknife jk = jackknife(data, i, j);
      std::vector<double> errors;
      for (Eigen::Index p : jk.peers) errors.push_back(held_in_error(data, jk, p));

      std::vector<Eigen::Index> selected;
      for (std::size_t a = 0; a < jk.peers.size(); ++a) {
        std::size_t better = 0;
        for (std::size_t b = 0; b < jk.peers.size(); ++b) {
          if (errors[b] < errors[a]) ++better;
        }
        if (static_cast<double>(better) / static_cast<double>(n - 1) < k) selected.push_back(jk.peers[a]);
      }
      if (selected.empty()) {
        std::size_t best = 0;
        for (std::size_t a = 1; a < errors.size(); ++a) {
          if (errors[a] < errors[best]) best = a;
        }
        selected.push_back(jk.peers[best]);
      }
      double sum = 0.0;
      for (Eigen::Index p : selected) sum += data.reports(i, p);
      t(i, j) = sum / static_cast<double>(selected.size());
    }
  }
  return t;
}

Eigen::MatrixXd reference_lsq(const Instance& data, std::size_t screen_size, double ridge) {
  const Eigen::Index m = data.reports.rows();
  const Eigen::Index n = data.reports.cols();
  Eigen::MatrixXd t(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Jackknife jk = jackknife(data, i, j);
      std::vector<double> errors;
      for (Eigen::Index p : jk.peers) errors.push_back(held_in_error(data, jk, p));

      // Repeated minimum extraction; ties go to the lower expert index.
      std::vector<bool> taken(jk.peers.size(), false);
      std::vector<Eigen::Index> screened;
      while (screened.size() < screen_size) {
        std::size_t best = jk.peers.size();
        for (std::size_t a = 0; a < jk.peers.size(); ++a) {
          if (taken[a]) continue;
          if (best == jk.peers.size() || errors[a] < errors[best]) best = a;
        }
        taken[best] = true;
        screened.push_back(jk.peers[best]);
      }

      const auto s = static_cast<Eigen::Index>(screened.size());
      const auto fit_rows = static_cast<Eigen::Index>(jk.rows.size());
      const Eigen::Index extra = ridge > 0.0 ? s : 0;
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(fit_rows + extra, s + 1);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(fit_rows + extra);
      for (Eigen::Index r = 0; r < fit_rows; ++r) {
        a(r, 0) = 1.0;
        for (Eigen::Index c = 0; c < s; ++c) a(r, c + 1) = data.reports(jk.rows[static_cast<std::size_t>(r)], screened[static_cast<std::size_t>(c)]);
        b[r] = data.outcomes[jk.rows[static_cast<std::size_t>(r)]];
      }
      for (Eigen::Index c = 0; c < extra; ++c) a(fit_rows + c, c + 1) = std::sqrt(ridge);

      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd beta = svd.solve(b);
      double prediction = beta[0];
      for (Eigen::Index c = 0; c < s; ++c) prediction += beta[c + 1] * data.reports(i, screened[static_cast<std::size_t>(c)]);
      t(i, j) = prediction;
    }
  }
  return t;
}

std::vector<double> scores(const Eigen::MatrixXd& reports, const Eigen::MatrixXd& reference) {
  std::vector<double> out(static_cast<std::size_t>(reports.cols()), 0.0);
  for (Eigen::Index j = 0; j < reports.cols(); ++j) {
    for (Eigen::Index i = 0; i < reports.rows(); ++i) {
      const double d = reports(i, j) - reference(i, j);
      out[static_cast<std::size_t>(j)] += d * d;
    }
  }
  return out;
}

std::size_t winner(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] < scores[best]) best = j;
  }
  return best;
}

}  // namespace womac::naive
