#include "multipcl/fusion.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace multipcl::fusion {

std::string variant_name(Variant v) { return v == Variant::mhca ? "mhca" : "fc"; }

Variant variant_from_name(const std::string& name) {
  if (name == "mhca") return Variant::mhca;
  if (name == "fc") return Variant::fc;
  throw ConfigError("unknown fusion variant '" + name + "'");
}

std::string pair_key(const ModalityPair& p) {
  return modality_name(p.first) + ":" + modality_name(p.second);
}

void FusionConfig::validate() const {
  if (model_dim <= 0) throw ConfigError("model_dim must be positive");
  if (heads <= 0) throw ConfigError("heads must be positive");
  if (model_dim % heads != 0) throw ConfigError("heads must divide model_dim");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
  if (modalities.empty()) throw ConfigError("modality set is empty");
  if (pairs.empty()) throw ConfigError("pair set is empty");
  std::set<Modality> s(modalities.begin(), modalities.end());
  if (s.size() != modalities.size()) throw ConfigError("duplicate modality in set");
  for (const auto& p : pairs) {
    if (!s.count(p.first) || !s.count(p.second)) {
      throw ConfigError("pair " + pair_key(p) + " references a modality outside the set");
    }
  }
  for (Modality m : modalities) {
    auto it = input_dims.find(m);
    if (it == input_dims.end() || it->second <= 0) {
      throw ConfigError("missing or non-positive input dimension for " + modality_name(m));
    }
  }
}

std::vector<ModalityPair> FusionConfig::all_pairs(const std::vector<Modality>& modalities) {
  std::vector<ModalityPair> out;
  for (Modality i : modalities)
    for (Modality j : modalities) out.emplace_back(i, j);
  return out;
}

FusionConfig FusionConfig::make(const std::vector<Modality>& modalities,
                                const std::map<Modality, long>& input_dims, int model_dim,
                                int heads) {
  FusionConfig c;
  c.model_dim = model_dim;
  c.heads = heads;
  c.modalities = modalities;
  c.pairs = all_pairs(modalities);
  c.input_dims = input_dims;
  c.validate();
  return c;
}

namespace {

Eigen::MatrixXd xavier(Rng& rng, long fan_in, long fan_out) {
  double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Eigen::MatrixXd w(fan_in, fan_out);
  for (long r = 0; r < fan_in; ++r)
    for (long c = 0; c < fan_out; ++c) w(r, c) = rng.uniform(-a, a);
  return w;
}

PairBlock block_of(const FusionModel& model, const ModalityPair& p) {
  const auto& params = model.params;
  if (model.config.shared_projections) {
    return PairBlock{params.at("mod." + modality_name(p.first) + ".Wq"),
                     params.at("mod." + modality_name(p.second) + ".Wk"),
                     params.at("mod." + modality_name(p.second) + ".Wv"),
                     params.at("mod." + modality_name(p.first) + ".Wo")};
  }
  const std::string base = "pair." + pair_key(p) + ".";
  return PairBlock{params.at(base + "Wq"), params.at(base + "Wk"), params.at(base + "Wv"),
                   params.at(base + "Wo")};
}

// Gradient destinations for a pair's block under either projection scheme.
struct BlockNames {
  std::string wq, wk, wv, wo;
};

BlockNames block_names(const FusionModel& model, const ModalityPair& p) {
  if (model.config.shared_projections) {
    return {"mod." + modality_name(p.first) + ".Wq", "mod." + modality_name(p.second) + ".Wk",
            "mod." + modality_name(p.second) + ".Wv", "mod." + modality_name(p.first) + ".Wo"};
  }
  const std::string base = "pair." + pair_key(p) + ".";
  return {base + "Wq", base + "Wk", base + "Wv", base + "Wo"};
}

}  // namespace

FusionModel FusionModel::init(const FusionConfig& config, Variant variant, std::uint64_t seed) {
  config.validate();
  FusionModel model;
  model.config = config;
  model.variant = variant;
  Rng rng = Rng(seed).fork("model-init");
  const long d = config.model_dim;
  for (Modality m : config.modalities) {
    model.params["in." + modality_name(m) + ".W"] = xavier(rng, config.input_dims.at(m), d);
    model.params["in." + modality_name(m) + ".b"] = Eigen::MatrixXd::Zero(d, 1);
  }
  if (variant == Variant::mhca) {
    if (config.shared_projections) {
      for (Modality m : config.modalities) {
        const std::string base = "mod." + modality_name(m) + ".";
        for (const char* nm : {"Wq", "Wk", "Wv", "Wo"}) {
          model.params[base + nm] = xavier(rng, d, d);
        }
      }
    } else {
      for (const auto& p : config.pairs) {
        const std::string base = "pair." + pair_key(p) + ".";
        for (const char* nm : {"Wq", "Wk", "Wv", "Wo"}) {
          model.params[base + nm] = xavier(rng, d, d);
        }
      }
    }
  } else {
    const long cat = d * static_cast<long>(config.modalities.size());
    model.params["fc.W"] = xavier(rng, cat, d);
    model.params["fc.b"] = Eigen::MatrixXd::Zero(d, 1);
  }
  model.params["head.w"] = xavier(rng, d, 1);
  model.params["head.b"] = Eigen::MatrixXd::Zero(1, 1);
  return model;
}

GradMap FusionModel::zero_grads() const {
  GradMap g;
  for (const auto& [name, value] : params) {
    g[name] = Eigen::MatrixXd::Zero(value.rows(), value.cols());
  }
  return g;
}

std::size_t FusionModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, value] : params) n += static_cast<std::size_t>(value.size());
  return n;
}

void FusionModel::check_finite() const {
  for (const auto& [name, value] : params) {
    if (!value.allFinite()) throw TrainingError("non-finite parameter '" + name + "'");
  }
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores) {
  Eigen::MatrixXd out(scores.rows(), scores.cols());
  for (long r = 0; r < scores.rows(); ++r) {
    double mx = scores.row(r).maxCoeff();
    Eigen::ArrayXd e = (scores.row(r).array() - mx).exp();
    out.row(r) = (e / e.sum()).matrix();
  }
  return out;
}

MhcaResult mhca_forward(const Eigen::MatrixXd& query_seq, const Eigen::MatrixXd& key_value_seq,
                        const PairBlock& block, int heads,
                        const std::vector<bool>* key_mask) {
  if (query_seq.rows() == 0) throw ContractError("mhca: empty query sequence");
  if (key_value_seq.rows() == 0) throw ContractError("mhca: empty key/value sequence");
  const long d = block.Wq.rows();
  if (query_seq.cols() != d || key_value_seq.cols() != d) {
    throw ContractError("mhca: sequence dimension does not match projection size");
  }
  if (heads <= 0 || d % heads != 0) throw ContractError("mhca: heads must divide model dim");
  const long dk = d / heads;

  MhcaResult r;
  r.Q = query_seq * block.Wq;
  r.K = key_value_seq * block.Wk;
  r.V = key_value_seq * block.Wv;
  r.concat.setZero(query_seq.rows(), d);
  r.attn.reserve(static_cast<std::size_t>(heads));

  bool use_mask = false;
  if (key_mask != nullptr) {
    bool any_open = false;
    for (long t = 0; t < key_value_seq.rows(); ++t) {
      if (!(*key_mask)[static_cast<std::size_t>(t)]) any_open = true;
    }
    use_mask = any_open;  // a fully-masked pair falls back to unmasked attention
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  for (int h = 0; h < heads; ++h) {
    auto qh = r.Q.middleCols(h * dk, dk);
    auto kh = r.K.middleCols(h * dk, dk);
    Eigen::MatrixXd scores = qh * kh.transpose() * scale;
    if (use_mask) {
      for (long t = 0; t < scores.cols(); ++t) {
        if ((*key_mask)[static_cast<std::size_t>(t)]) scores.col(t).setConstant(-1e30);
      }
    }
    Eigen::MatrixXd attn = softmax_rows(scores);
    r.concat.middleCols(h * dk, dk) = attn * r.V.middleCols(h * dk, dk);
    r.attn.push_back(std::move(attn));
  }
  r.out = r.concat * block.Wo;
  return r;
}

Eigen::MatrixXd mhca(const Eigen::MatrixXd& query_seq, const Eigen::MatrixXd& key_value_seq,
                     const PairBlock& block, int heads) {
  return mhca_forward(query_seq, key_value_seq, block, heads).out;
}

void mhca_backward(const MhcaResult& fwd, const Eigen::MatrixXd& query_seq,
                   const Eigen::MatrixXd& key_value_seq, const PairBlock& block, int heads,
                   const Eigen::MatrixXd& d_out, PairBlock& d_block, Eigen::MatrixXd& d_query,
                   Eigen::MatrixXd& d_kv) {
  const long d = block.Wq.rows();
  const long dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  d_block.Wo = fwd.concat.transpose() * d_out;
  Eigen::MatrixXd d_concat = d_out * block.Wo.transpose();

  Eigen::MatrixXd dQ = Eigen::MatrixXd::Zero(fwd.Q.rows(), d);
  Eigen::MatrixXd dK = Eigen::MatrixXd::Zero(fwd.K.rows(), d);
  Eigen::MatrixXd dV = Eigen::MatrixXd::Zero(fwd.V.rows(), d);

  for (int h = 0; h < heads; ++h) {
    const Eigen::MatrixXd& attn = fwd.attn[static_cast<std::size_t>(h)];
    auto vh = fwd.V.middleCols(h * dk, dk);
    auto dCh = d_concat.middleCols(h * dk, dk);
    Eigen::MatrixXd d_attn = dCh * vh.transpose();
    dV.middleCols(h * dk, dk) = attn.transpose() * dCh;
    // softmax jacobian applied row-wise
    Eigen::VectorXd row_dot = (d_attn.array() * attn.array()).rowwise().sum();
    Eigen::MatrixXd d_scores =
        (attn.array() * (d_attn.array().colwise() - row_dot.array())).matrix() * scale;
    dQ.middleCols(h * dk, dk) = d_scores * fwd.K.middleCols(h * dk, dk);
    dK.middleCols(h * dk, dk) = d_scores.transpose() * fwd.Q.middleCols(h * dk, dk);
  }

  d_block.Wq = query_seq.transpose() * dQ;
  d_block.Wk = key_value_seq.transpose() * dK;
  d_block.Wv = key_value_seq.transpose() * dV;
  d_query = dQ * block.Wq.transpose();
  d_kv = dK * block.Wk.transpose() + dV * block.Wv.transpose();
}

double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

std::vector<bool> zero_row_mask(const Eigen::MatrixXd& x) {
  std::vector<bool> mask(static_cast<std::size_t>(x.rows()));
  for (long r = 0; r < x.rows(); ++r) {
    mask[static_cast<std::size_t>(r)] = (x.row(r).array() == 0.0).all();
  }
  return mask;
}

}  // namespace

ForwardTrace forward(const FusionModel& model, const SampleInputs& inputs, Rng* dropout_rng) {
  const FusionConfig& cfg = model.config;
  ForwardTrace tr;
  tr.inputs = inputs;
  const long d = cfg.model_dim;

  for (Modality m : cfg.modalities) {
    auto it = inputs.find(m);
    if (it == inputs.end()) {
      throw ConfigError("configured modality " + modality_name(m) + " missing from inputs");
    }
    if (it->second.rows() == 0) {
      throw ConfigError("modality " + modality_name(m) + " has an empty sequence");
    }
    if (it->second.cols() != cfg.input_dims.at(m)) {
      throw ContractError("modality " + modality_name(m) + " input dimension " +
                          std::to_string(it->second.cols()) + " != configured " +
                          std::to_string(cfg.input_dims.at(m)));
    }
    const Eigen::MatrixXd& W = model.params.at("in." + modality_name(m) + ".W");
    const Eigen::MatrixXd& b = model.params.at("in." + modality_name(m) + ".b");
    tr.hidden[m] = (it->second * W).rowwise() + b.col(0).transpose();
  }

  if (model.variant == Variant::fc) {
    const auto n_mods = static_cast<long>(cfg.modalities.size());
    tr.fc_concat.resize(n_mods * d);
    for (long mi = 0; mi < n_mods; ++mi) {
      const Eigen::MatrixXd& H = tr.hidden.at(cfg.modalities[static_cast<std::size_t>(mi)]);
      tr.fc_concat.segment(mi * d, d) = H.colwise().mean().transpose();
    }
    tr.unified = model.params.at("fc.W").transpose() * tr.fc_concat +
                 model.params.at("fc.b").col(0);
  } else {
    std::map<Modality, std::vector<bool>> zero_masks;
    if (cfg.mask_zero_keys) {
      for (Modality m : cfg.modalities) zero_masks[m] = zero_row_mask(inputs.at(m));
    }
    tr.unified = Eigen::VectorXd::Zero(d);
    for (const auto& p : cfg.pairs) {
      PairState st;
      const std::vector<bool>* mask =
          cfg.mask_zero_keys ? &zero_masks.at(p.second) : nullptr;
      st.mhca = mhca_forward(tr.hidden.at(p.first), tr.hidden.at(p.second),
                             block_of(model, p), cfg.heads, mask);
      Eigen::MatrixXd attended = st.mhca.out;
      if (dropout_rng != nullptr && cfg.dropout > 0.0) {
        const double keep = 1.0 - cfg.dropout;
        st.dropout_mask.resize(attended.rows(), attended.cols());
        for (long r = 0; r < attended.rows(); ++r)
          for (long c = 0; c < attended.cols(); ++c)
            st.dropout_mask(r, c) = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
        attended = attended.cwiseProduct(st.dropout_mask);
      }
      st.pooled = attended.colwise().mean().transpose();
      tr.unified += st.pooled;
      tr.pairs.emplace(pair_key(p), std::move(st));
    }
  }

  tr.logit = model.params.at("head.w").col(0).dot(tr.unified) + model.params.at("head.b")(0, 0);
  if (!std::isfinite(tr.logit)) throw TrainingError("non-finite logit in forward pass");
  return tr;
}

void backward(const FusionModel& model, const ForwardTrace& tr, double dlogit, GradMap& grads) {
  const FusionConfig& cfg = model.config;
  const long d = cfg.model_dim;

  grads.at("head.w") += dlogit * tr.unified;
  grads.at("head.b")(0, 0) += dlogit;
  Eigen::VectorXd dZ = dlogit * model.params.at("head.w").col(0);

  std::map<Modality, Eigen::MatrixXd> dH;
  for (Modality m : cfg.modalities) {
    const Eigen::MatrixXd& H = tr.hidden.at(m);
    dH[m] = Eigen::MatrixXd::Zero(H.rows(), H.cols());
  }

  if (model.variant == Variant::fc) {
    grads.at("fc.b").col(0) += dZ;
    grads.at("fc.W") += tr.fc_concat * dZ.transpose();
    Eigen::VectorXd d_concat = model.params.at("fc.W") * dZ;
    for (std::size_t mi = 0; mi < cfg.modalities.size(); ++mi) {
      Modality m = cfg.modalities[mi];
      const long n = tr.hidden.at(m).rows();
      Eigen::RowVectorXd d_pool =
          d_concat.segment(static_cast<long>(mi) * d, d).transpose() / static_cast<double>(n);
      dH.at(m).rowwise() += d_pool;
    }
  } else {
    for (const auto& p : cfg.pairs) {
      const PairState& st = tr.pairs.at(pair_key(p));
      const long nq = st.mhca.out.rows();
      Eigen::MatrixXd d_attended(nq, d);
      d_attended.rowwise() = dZ.transpose() / static_cast<double>(nq);
      if (st.dropout_mask.size() > 0) {
        d_attended = d_attended.cwiseProduct(st.dropout_mask);
      }
      PairBlock d_block;
      Eigen::MatrixXd d_query, d_kv;
      mhca_backward(st.mhca, tr.hidden.at(p.first), tr.hidden.at(p.second),
                    block_of(model, p), cfg.heads, d_attended, d_block, d_query, d_kv);
      BlockNames names = block_names(model, p);
      grads.at(names.wq) += d_block.Wq;
      grads.at(names.wk) += d_block.Wk;
      grads.at(names.wv) += d_block.Wv;
      grads.at(names.wo) += d_block.Wo;
      dH.at(p.first) += d_query;
      dH.at(p.second) += d_kv;
    }
  }

  for (Modality m : cfg.modalities) {
    const std::string base = "in." + modality_name(m) + ".";
    grads.at(base + "W") += tr.inputs.at(m).transpose() * dH.at(m);
    grads.at(base + "b").col(0) += dH.at(m).colwise().sum().transpose();
  }

  for (const auto& [name, g] : grads) {
    if (!g.allFinite()) throw TrainingError("non-finite gradient for parameter '" + name + "'");
  }
}

SampleInputs bundle_inputs(const ingest::ModalityBundle& bundle,
                           const std::vector<Modality>& modalities) {
  SampleInputs inputs;
  for (Modality m : modalities) {
    if (!bundle.has(m)) {
      throw ConfigError("bundle is missing configured modality " + modality_name(m));
    }
    inputs[m] = bundle.of(m).to_eigen();
  }
  return inputs;
}

namespace {

FusionOutput package_output(const FusionModel& model, ForwardTrace&& tr) {
  FusionOutput out;
  for (auto& [key, st] : tr.pairs) {
    out.attended[key] = std::move(st.mhca.out);
    out.pooled[key] = std::move(st.pooled);
  }
  if (model.variant == Variant::fc) {
    for (std::size_t mi = 0; mi < model.config.modalities.size(); ++mi) {
      Modality m = model.config.modalities[mi];
      out.pooled[modality_name(m)] = tr.fc_concat.segment(
          static_cast<long>(mi) * model.config.model_dim, model.config.model_dim);
    }
  }
  out.unified = std::move(tr.unified);
  out.logit = tr.logit;
  out.probability = sigmoid(tr.logit);
  return out;
}

}  // namespace

FusionOutput fuse(const ingest::ModalityBundle& bundle, const FusionModel& model) {
  if (model.variant != Variant::mhca) {
    throw ContractError("fuse called with a non-MHCA model; use fc_fusion_baseline");
  }
  SampleInputs inputs = bundle_inputs(bundle, model.config.modalities);
  return package_output(model, forward(model, inputs));
}

FusionOutput fc_fusion_baseline(const ingest::ModalityBundle& bundle, const FusionModel& model) {
  if (model.variant != Variant::fc) {
    throw ContractError("fc_fusion_baseline needs a model initialized with Variant::fc");
  }
  SampleInputs inputs = bundle_inputs(bundle, model.config.modalities);
  return package_output(model, forward(model, inputs));
}

}  // namespace multipcl::fusion
