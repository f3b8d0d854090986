#pragma once

#include "disae/core.hpp"
#include "disae/random.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace disae::nn {

enum class Activation { relu, linear };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

// y = act(x * W + b); W is in x out so that a batch is one row per sample.
struct Layer {
    Matrix W;
    Vector b;
    Activation act = Activation::linear;
};

struct ForwardCache {
    std::uint64_t revision = 0;
    // inputs[0] is the batch; inputs[i + 1] is the output of layer i.
    std::vector<Matrix> outputs;

    const Matrix& result() const { return outputs.back(); }
};

struct Gradients {
    std::vector<Matrix> dW;
    std::vector<Vector> db;
    Matrix d_input;
};

class DenseNet {
public:
    DenseNet() = default;
    // widths = {in, h1, ..., out}; one activation per layer. Parameters start at zero.
    DenseNet(const std::vector<int>& widths, const std::vector<Activation>& activations);

    // Uniform fan-in initialisation: U(-sqrt(6/fan_in), +) for relu layers,
    // U(-sqrt(3/fan_in), +) for linear ones; biases zero.
    void initialize(Rng& rng);

    int input_width() const;
    int output_width() const;
    std::vector<int> widths() const;
    std::size_t n_layers() const { return layers_.size(); }
    Index parameter_count() const;

    const std::vector<Layer>& layers() const { return layers_; }
    // Mutable access invalidates every outstanding forward cache.
    std::vector<Layer>& mutable_layers();

    std::uint64_t revision() const { return revision_; }

    Matrix forward(const Matrix& x) const;
    ForwardCache forward_cached(const Matrix& x) const;
    // Throws if the cache was produced before the last parameter change.
    Gradients backward(const ForwardCache& cache, const Matrix& upstream) const;

    bool all_finite() const;

private:
    void check_input(const Matrix& x) const;

    std::vector<Layer> layers_;
    std::uint64_t revision_ = 0;
};

// Builds {in, hidden..., out} with relu on hidden layers and `last` on the output.
DenseNet make_mlp(int in, const std::vector<int>& hidden, int out, Activation last, Rng& rng);

// Identity in the forward pass; scales the incoming gradient by -lambda.
struct GradReversal {
    double lambda = 1.0;

    const Matrix& forward(const Matrix& x) const { return x; }
    Matrix backward(const Matrix& g) const;
};

Matrix grad_reversal_backward(const Matrix& g, double lambda);

}  // namespace disae::nn
