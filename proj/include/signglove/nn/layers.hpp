#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signglove/nn/autodiff.hpp"
#include "signglove/rng.hpp"

namespace signglove::nn {

struct NamedParam {
    std::string name;
    ValuePtr value;
};

class Module {
public:
    virtual ~Module() = default;
    virtual ValuePtr forward(const ValuePtr& x) = 0;
    virtual void collect_parameters(const std::string& prefix,
                                    std::vector<NamedParam>& out) const = 0;
    virtual void set_training(bool train) { training_ = train; }
    bool training() const { return training_; }

protected:
    bool training_ = true;
};

class Linear : public Module {
public:
    Linear(std::size_t in_features, std::size_t out_features, Rng& rng);
    ValuePtr forward(const ValuePtr& x) override;
    void collect_parameters(const std::string& prefix,
                            std::vector<NamedParam>& out) const override;

    ValuePtr weight;  // (in, out)
    ValuePtr bias;    // (out)
};

class Conv1d : public Module {
public:
    Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
           std::size_t padding, Rng& rng);
    ValuePtr forward(const ValuePtr& x) override;
    void collect_parameters(const std::string& prefix,
                            std::vector<NamedParam>& out) const override;

    ValuePtr weight;  // (out, in, k)
    ValuePtr bias;    // (out)
    std::size_t padding;
};

// Works on (B, C, L) with per-channel statistics over batch and length, and
// on (B, C) with per-feature statistics over the batch. Running statistics
// use momentum 0.1 and take over in eval mode.
class BatchNorm1d : public Module {
public:
    explicit BatchNorm1d(std::size_t channels, double eps = 1e-5, double momentum = 0.1);
    ValuePtr forward(const ValuePtr& x) override;
    void collect_parameters(const std::string& prefix,
                            std::vector<NamedParam>& out) const override;

    ValuePtr gamma;
    ValuePtr beta;
    Tensor running_mean;
    Tensor running_var;

private:
    std::size_t channels_;
    double eps_;
    double momentum_;
};

// Per-sample normalization over the feature axis of (B, F), then affine.
class LayerNorm : public Module {
public:
    explicit LayerNorm(std::size_t features, double eps = 1e-5);
    ValuePtr forward(const ValuePtr& x) override;
    void collect_parameters(const std::string& prefix,
                            std::vector<NamedParam>& out) const override;

    ValuePtr gamma;
    ValuePtr beta;

private:
    std::size_t features_;
    double eps_;
};

// Inverted dropout: train-time scaling by 1/(1-p), identity in eval mode.
class Dropout : public Module {
public:
    explicit Dropout(double p, std::uint64_t seed = 0);
    ValuePtr forward(const ValuePtr& x) override;
    void collect_parameters(const std::string&, std::vector<NamedParam>&) const override {}
    void reseed(std::uint64_t seed) { rng_ = Rng(seed); }

private:
    double p_;
    Rng rng_;
};

}  // namespace signglove::nn
