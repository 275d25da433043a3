#include "scalar_oracle.h"

#include <cmath>
#include <vector>

namespace multipcl::testing {

namespace {

using Table = std::vector<std::vector<double>>;

Table to_table(const Eigen::MatrixXd& m) {
  Table t(static_cast<std::size_t>(m.rows()),
          std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c)
      t[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
  return t;
}

Table matmul(const Table& a, const Table& b) {
  Table out(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

}  // namespace

double scalar_oracle_logit(const fusion::FusionModel& model,
                           const fusion::SampleInputs& inputs) {
  const auto& cfg = model.config;
  const std::size_t d = static_cast<std::size_t>(cfg.model_dim);
  const std::size_t heads = static_cast<std::size_t>(cfg.heads);
  const std::size_t dk = d / heads;

  // input projections: H = X W + b
  std::map<Modality, Table> hidden;
  for (Modality m : cfg.modalities) {
    Table x = to_table(inputs.at(m));
    Table w = to_table(model.params.at("in." + modality_name(m) + ".W"));
    Table b = to_table(model.params.at("in." + modality_name(m) + ".b"));
    Table h = matmul(x, w);
    for (auto& row : h)
      for (std::size_t j = 0; j < d; ++j) row[j] += b[j][0];
    hidden[m] = h;
  }

  std::vector<double> unified(d, 0.0);
  for (const auto& p : cfg.pairs) {
    const std::string base = cfg.shared_projections
                                 ? std::string("mod.")
                                 : "pair." + fusion::pair_key(p) + ".";
    auto pname = [&](const char* w, Modality m) {
      return cfg.shared_projections ? "mod." + modality_name(m) + "." + w : base + w;
    };
    Table Q = matmul(hidden.at(p.first), to_table(model.params.at(pname("Wq", p.first))));
    Table K = matmul(hidden.at(p.second), to_table(model.params.at(pname("Wk", p.second))));
    Table V = matmul(hidden.at(p.second), to_table(model.params.at(pname("Wv", p.second))));
    const std::size_t nq = Q.size(), nk = K.size();

    Table concat(nq, std::vector<double>(d, 0.0));
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t qi = 0; qi < nq; ++qi) {
        // scaled dot-product scores against every key
        std::vector<double> scores(nk, 0.0);
        for (std::size_t ki = 0; ki < nk; ++ki) {
          double dot = 0.0;
          for (std::size_t c = 0; c < dk; ++c) dot += Q[qi][h * dk + c] * K[ki][h * dk + c];
          scores[ki] = dot / std::sqrt(static_cast<double>(dk));
        }
        double mx = scores[0];
        for (double s : scores) mx = std::max(mx, s);
        double denom = 0.0;
        for (double s : scores) denom += std::exp(s - mx);
        for (std::size_t ki = 0; ki < nk; ++ki) {
          double weight = std::exp(scores[ki] - mx) / denom;
          for (std::size_t c = 0; c < dk; ++c) {
            concat[qi][h * dk + c] += weight * V[ki][h * dk + c];
          }
        }
      }
    }
    Table attended = matmul(concat, to_table(model.params.at(pname("Wo", p.first))));
    for (std::size_t j = 0; j < d; ++j) {
      double pool = 0.0;
      for (std::size_t qi = 0; qi < nq; ++qi) pool += attended[qi][j];
      unified[j] += pool / static_cast<double>(nq);
    }
  }

  Table head_w = to_table(model.params.at("head.w"));
  double logit = model.params.at("head.b")(0, 0);
  for (std::size_t j = 0; j < d; ++j) logit += head_w[j][0] * unified[j];
  return logit;
}

}  // namespace multipcl::testing
