#include "disae/nn/dense.hpp"

#include <atomic>
#include <cmath>

namespace disae::nn {

namespace {

// Global so that two different networks never share a revision stamp.
std::uint64_t next_revision() {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "linear"; }

Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "linear") return Activation::linear;
    throw FormatError("unknown activation '" + s + "'");
}

DenseNet::DenseNet(const std::vector<int>& widths, const std::vector<Activation>& activations) {
    if (widths.size() < 2) throw ConfigError("DenseNet needs at least an input and an output width");
    if (activations.size() != widths.size() - 1)
        throw ConfigError("DenseNet: expected " + std::to_string(widths.size() - 1) + " activations, got " +
                          std::to_string(activations.size()));
    for (int w : widths)
        if (w < 1) throw ConfigError("DenseNet: layer widths must be positive");
    for (std::size_t i = 0; i + 1 < widths.size(); ++i)
        layers_.push_back({Matrix::Zero(widths[i], widths[i + 1]), Vector::Zero(widths[i + 1]), activations[i]});
    revision_ = next_revision();
}

void DenseNet::initialize(Rng& rng) {
    for (auto& layer : layers_) {
        const double fan_in = static_cast<double>(layer.W.rows());
        const double limit = std::sqrt((layer.act == Activation::relu ? 6.0 : 3.0) / fan_in);
        for (Index c = 0; c < layer.W.cols(); ++c)
            for (Index r = 0; r < layer.W.rows(); ++r) layer.W(r, c) = rng.uniform(-limit, limit);
        layer.b.setZero();
    }
    revision_ = next_revision();
}

int DenseNet::input_width() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().W.rows()); }
int DenseNet::output_width() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().W.cols()); }

std::vector<int> DenseNet::widths() const {
    std::vector<int> w;
    if (layers_.empty()) return w;
    w.push_back(input_width());
    for (const auto& l : layers_) w.push_back(static_cast<int>(l.W.cols()));
    return w;
}

Index DenseNet::parameter_count() const {
    Index n = 0;
    for (const auto& l : layers_) n += l.W.size() + l.b.size();
    return n;
}

std::vector<Layer>& DenseNet::mutable_layers() {
    revision_ = next_revision();
    return layers_;
}

void DenseNet::check_input(const Matrix& x) const {
    if (layers_.empty()) throw ShapeError("forward on an empty DenseNet");
    if (x.cols() != input_width())
        throw ShapeError("DenseNet expects " + std::to_string(input_width()) + " input columns, got " +
                         std::to_string(x.cols()));
}

Matrix DenseNet::forward(const Matrix& x) const {
    check_input(x);
    Matrix h = x;
    for (const auto& l : layers_) {
        Matrix z = h * l.W;
        z.rowwise() += l.b.transpose();
        if (l.act == Activation::relu) z = z.cwiseMax(0.0);
        h = std::move(z);
    }
    return h;
}

ForwardCache DenseNet::forward_cached(const Matrix& x) const {
    check_input(x);
    ForwardCache cache;
    cache.revision = revision_;
    cache.outputs.reserve(layers_.size() + 1);
    cache.outputs.push_back(x);
    for (const auto& l : layers_) {
        Matrix z = cache.outputs.back() * l.W;
        z.rowwise() += l.b.transpose();
        if (l.act == Activation::relu) z = z.cwiseMax(0.0);
        cache.outputs.push_back(std::move(z));
    }
    return cache;
}

Gradients DenseNet::backward(const ForwardCache& cache, const Matrix& upstream) const {
    if (cache.revision != revision_ || cache.outputs.size() != layers_.size() + 1)
        throw Error("stale forward cache: parameters changed since the forward pass");
    const Matrix& out = cache.result();
    if (upstream.rows() != out.rows() || upstream.cols() != out.cols())
        throw ShapeError("upstream gradient shape does not match network output");

    Gradients g;
    g.dW.resize(layers_.size());
    g.db.resize(layers_.size());
    Matrix delta = upstream;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        const Layer& l = layers_[i];
        if (l.act == Activation::relu) {
            // Output is zero exactly where the pre-activation was non-positive.
            delta = (cache.outputs[i + 1].array() > 0.0).select(delta, 0.0);
        }
        g.dW[i] = cache.outputs[i].transpose() * delta;
        g.db[i] = delta.colwise().sum().transpose();
        delta = delta * l.W.transpose();
    }
    g.d_input = std::move(delta);
    return g;
}

bool DenseNet::all_finite() const {
    for (const auto& l : layers_)
        if (!l.W.allFinite() || !l.b.allFinite()) return false;
    return true;
}

DenseNet make_mlp(int in, const std::vector<int>& hidden, int out, Activation last, Rng& rng) {
    std::vector<int> widths{in};
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(out);
    std::vector<Activation> acts(hidden.size(), Activation::relu);
    acts.push_back(last);
    DenseNet net(widths, acts);
    net.initialize(rng);
    return net;
}

Matrix GradReversal::backward(const Matrix& g) const { return grad_reversal_backward(g, lambda); }

Matrix grad_reversal_backward(const Matrix& g, double lambda) { return -lambda * g; }

}  // namespace disae::nn
