#include "memeclf/autodiff.hpp"

#include <cmath>

#include "memeclf/errors.hpp"

namespace memeclf::nn {

namespace {

void check_same_shape(const NodePtr& a, const NodePtr& b, const char* op) {
    if (a->value.rows() != b->value.rows() || a->value.cols() != b->value.cols())
        throw ArgumentError(std::string(op) + ": shape mismatch " +
                            std::to_string(a->value.rows()) + "x" + std::to_string(a->value.cols()) +
                            " vs " + std::to_string(b->value.rows()) + "x" +
                            std::to_string(b->value.cols()));
}

} // namespace

NodePtr constant(Eigen::MatrixXd value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = false;
    return n;
}

NodePtr parameter(Eigen::MatrixXd value, std::string name) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->grad = Eigen::MatrixXd::Zero(n->value.rows(), n->value.cols());
    n->requires_grad = true;
    n->name = std::move(name);
    return n;
}

NodePtr Tape::emit(Eigen::MatrixXd value, std::vector<NodePtr> parents,
                   std::function<void(Node&)> backprop) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->parents = std::move(parents);
    n->backprop = std::move(backprop);
    for (const auto& p : n->parents)
        if (p->requires_grad) n->requires_grad = true;
    if (n->requires_grad) order_.push_back(n);
    return n;
}

void Tape::backward(const NodePtr& loss, double seed) {
    if (order_.empty() || order_.back() != loss)
        throw ArgumentError("Tape::backward: loss is not the last recorded node");
    loss->accumulate(Eigen::MatrixXd::Constant(loss->value.rows(), loss->value.cols(), seed));
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
        Node& n = **it;
        if (n.grad.size() == 0) continue; // no gradient reached this node
        if (n.backprop) n.backprop(n);
    }
}

NodePtr Tape::add(NodePtr a, NodePtr b) {
    check_same_shape(a, b, "add");
    return emit(a->value + b->value, {a, b}, [](Node& n) {
        if (n.parents[0]->requires_grad) n.parents[0]->accumulate(n.grad);
        if (n.parents[1]->requires_grad) n.parents[1]->accumulate(n.grad);
    });
}

NodePtr Tape::add_rowvec(NodePtr a, NodePtr row) {
    if (row->value.rows() != 1 || row->value.cols() != a->value.cols())
        throw ArgumentError("add_rowvec: row must be 1 x cols(a)");
    Eigen::MatrixXd v = a->value;
    v.rowwise() += row->value.row(0);
    return emit(std::move(v), {a, row}, [](Node& n) {
        if (n.parents[0]->requires_grad) n.parents[0]->accumulate(n.grad);
        if (n.parents[1]->requires_grad)
            n.parents[1]->accumulate(n.grad.colwise().sum());
    });
}

NodePtr Tape::sub(NodePtr a, NodePtr b) {
    check_same_shape(a, b, "sub");
    return emit(a->value - b->value, {a, b}, [](Node& n) {
        if (n.parents[0]->requires_grad) n.parents[0]->accumulate(n.grad);
        if (n.parents[1]->requires_grad) n.parents[1]->accumulate(-n.grad);
    });
}

NodePtr Tape::mul_elem(NodePtr a, NodePtr b) {
    check_same_shape(a, b, "mul_elem");
    return emit(a->value.cwiseProduct(b->value), {a, b}, [](Node& n) {
        if (n.parents[0]->requires_grad)
            n.parents[0]->accumulate(n.grad.cwiseProduct(n.parents[1]->value));
        if (n.parents[1]->requires_grad)
            n.parents[1]->accumulate(n.grad.cwiseProduct(n.parents[0]->value));
    });
}

NodePtr Tape::scale(NodePtr a, double s) {
    return emit(a->value * s, {a}, [s](Node& n) {
        if (n.parents[0]->requires_grad) n.parents[0]->accumulate(n.grad * s);
    });
}

NodePtr Tape::matmul(NodePtr a, NodePtr b) {
    if (a->value.cols() != b->value.rows())
        throw ArgumentError("matmul: inner dimensions differ (" +
                            std::to_string(a->value.cols()) + " vs " +
                            std::to_string(b->value.rows()) + ")");
    return emit(a->value * b->value, {a, b}, [](Node& n) {
        if (n.parents[0]->requires_grad)
            n.parents[0]->accumulate(n.grad * n.parents[1]->value.transpose());
        if (n.parents[1]->requires_grad)
            n.parents[1]->accumulate(n.parents[0]->value.transpose() * n.grad);
    });
}

NodePtr Tape::matmul_t(NodePtr a, NodePtr b) {
    if (a->value.cols() != b->value.cols())
        throw ArgumentError("matmul_t: column counts differ");
    return emit(a->value * b->value.transpose(), {a, b}, [](Node& n) {
        if (n.parents[0]->requires_grad)
            n.parents[0]->accumulate(n.grad * n.parents[1]->value);
        if (n.parents[1]->requires_grad)
            n.parents[1]->accumulate(n.grad.transpose() * n.parents[0]->value);
    });
}

NodePtr Tape::gather_rows(NodePtr table, std::vector<int> rows) {
    Eigen::MatrixXd v(static_cast<Eigen::Index>(rows.size()), table->value.cols());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= table->value.rows())
            throw ArgumentError("gather_rows: index out of range");
        v.row(static_cast<Eigen::Index>(i)) = table->value.row(rows[i]);
    }
    return emit(std::move(v), {table}, [rows](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n.parents[0]->value.rows(),
                                                  n.parents[0]->value.cols());
        for (size_t i = 0; i < rows.size(); ++i)
            g.row(rows[i]) += n.grad.row(static_cast<Eigen::Index>(i));
        n.parents[0]->accumulate(g);
    });
}

NodePtr Tape::slice_rows(NodePtr a, int from, int count) {
    if (from < 0 || count <= 0 || from + count > a->value.rows())
        throw ArgumentError("slice_rows: range out of bounds");
    return emit(a->value.middleRows(from, count), {a}, [from, count](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n.parents[0]->value.rows(),
                                                  n.parents[0]->value.cols());
        g.middleRows(from, count) = n.grad;
        n.parents[0]->accumulate(g);
    });
}

NodePtr Tape::slice_cols(NodePtr a, int from, int count) {
    if (from < 0 || count <= 0 || from + count > a->value.cols())
        throw ArgumentError("slice_cols: range out of bounds");
    return emit(a->value.middleCols(from, count), {a}, [from, count](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n.parents[0]->value.rows(),
                                                  n.parents[0]->value.cols());
        g.middleCols(from, count) = n.grad;
        n.parents[0]->accumulate(g);
    });
}

NodePtr Tape::concat_rows(std::vector<NodePtr> parts) {
    if (parts.empty()) throw ArgumentError("concat_rows: empty list");
    Eigen::Index rows = 0;
    const Eigen::Index cols = parts[0]->value.cols();
    for (const auto& p : parts) {
        if (p->value.cols() != cols) throw ArgumentError("concat_rows: column mismatch");
        rows += p->value.rows();
    }
    Eigen::MatrixXd v(rows, cols);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        v.middleRows(at, p->value.rows()) = p->value;
        at += p->value.rows();
    }
    return emit(std::move(v), parts, [](Node& n) {
        Eigen::Index at = 0;
        for (auto& p : n.parents) {
            if (p->requires_grad) p->accumulate(n.grad.middleRows(at, p->value.rows()));
            at += p->value.rows();
        }
    });
}

NodePtr Tape::concat_cols(std::vector<NodePtr> parts) {
    if (parts.empty()) throw ArgumentError("concat_cols: empty list");
    Eigen::Index cols = 0;
    const Eigen::Index rows = parts[0]->value.rows();
    for (const auto& p : parts) {
        if (p->value.rows() != rows) throw ArgumentError("concat_cols: row mismatch");
        cols += p->value.cols();
    }
    Eigen::MatrixXd v(rows, cols);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        v.middleCols(at, p->value.cols()) = p->value;
        at += p->value.cols();
    }
    return emit(std::move(v), parts, [](Node& n) {
        Eigen::Index at = 0;
        for (auto& p : n.parents) {
            if (p->requires_grad) p->accumulate(n.grad.middleCols(at, p->value.cols()));
            at += p->value.cols();
        }
    });
}

NodePtr Tape::mean_rows(NodePtr a) {
    const double inv = 1.0 / static_cast<double>(a->value.rows());
    Eigen::MatrixXd v = a->value.colwise().mean();
    return emit(std::move(v), {a}, [inv](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        Eigen::MatrixXd g(n.parents[0]->value.rows(), n.parents[0]->value.cols());
        g = (n.grad.row(0) * inv).replicate(n.parents[0]->value.rows(), 1);
        n.parents[0]->accumulate(g);
    });
}

NodePtr Tape::tanh_(NodePtr a) {
    return emit(a->value.array().tanh(), {a}, [](Node& n) {
        if (n.parents[0]->requires_grad)
            n.parents[0]->accumulate(
                (n.grad.array() * (1.0 - n.value.array().square())).matrix());
    });
}

Eigen::MatrixXd sigmoid_values(const Eigen::MatrixXd& logits) {
    return logits.unaryExpr([](double z) {
        if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
        double e = std::exp(z);
        return e / (1.0 + e);
    });
}

NodePtr Tape::sigmoid_(NodePtr a) {
    return emit(sigmoid_values(a->value), {a}, [](Node& n) {
        if (n.parents[0]->requires_grad)
            n.parents[0]->accumulate(
                (n.grad.array() * n.value.array() * (1.0 - n.value.array())).matrix());
    });
}

NodePtr Tape::gelu_(NodePtr a) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd v = a->value.unaryExpr([inv_sqrt2](double t) {
        return 0.5 * t * (1.0 + std::erf(t * inv_sqrt2));
    });
    return emit(std::move(v), {a}, [inv_sqrt2](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * M_PI);
        Eigen::MatrixXd d = n.parents[0]->value.unaryExpr([&](double t) {
            return 0.5 * (1.0 + std::erf(t * inv_sqrt2)) +
                   t * inv_sqrt2pi * std::exp(-0.5 * t * t);
        });
        n.parents[0]->accumulate(n.grad.cwiseProduct(d));
    });
}

NodePtr Tape::softmax_rows(NodePtr a) {
    Eigen::MatrixXd v = a->value;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        double m = v.row(r).maxCoeff();
        v.row(r) = (v.row(r).array() - m).exp();
        v.row(r) /= v.row(r).sum();
    }
    return emit(std::move(v), {a}, [](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        const Eigen::MatrixXd& y = n.value;
        Eigen::MatrixXd g(y.rows(), y.cols());
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
            double dot = n.grad.row(r).dot(y.row(r));
            g.row(r) = (n.grad.row(r).array() - dot) * y.row(r).array();
        }
        n.parents[0]->accumulate(g);
    });
}

NodePtr Tape::layer_norm(NodePtr x, NodePtr gamma, NodePtr beta, double eps) {
    if (gamma->value.rows() != 1 || gamma->value.cols() != x->value.cols() ||
        beta->value.rows() != 1 || beta->value.cols() != x->value.cols())
        throw ArgumentError("layer_norm: gamma/beta must be 1 x cols(x)");

    const Eigen::Index rows = x->value.rows(), cols = x->value.cols();
    Eigen::MatrixXd xhat(rows, cols);
    Eigen::VectorXd inv_sigma(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        double mu = x->value.row(r).mean();
        Eigen::RowVectorXd centered = x->value.row(r).array() - mu;
        double var = centered.squaredNorm() / cols;
        inv_sigma(r) = 1.0 / std::sqrt(var + eps);
        xhat.row(r) = centered * inv_sigma(r);
    }
    Eigen::MatrixXd v(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        v.row(r) = xhat.row(r).cwiseProduct(gamma->value.row(0)) + beta->value.row(0);

    return emit(std::move(v), {x, gamma, beta}, [xhat, inv_sigma](Node& n) {
        const Eigen::Index rows = xhat.rows(), cols = xhat.cols();
        auto& xp = n.parents[0];
        auto& gp = n.parents[1];
        auto& bp = n.parents[2];
        if (bp->requires_grad) bp->accumulate(n.grad.colwise().sum());
        if (gp->requires_grad)
            gp->accumulate(n.grad.cwiseProduct(xhat).colwise().sum());
        if (xp->requires_grad) {
            Eigen::MatrixXd g(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                Eigen::RowVectorXd dxhat =
                    n.grad.row(r).cwiseProduct(gp->value.row(0));
                double mean_dxhat = dxhat.mean();
                double mean_dxhat_xhat = dxhat.cwiseProduct(xhat.row(r)).mean();
                g.row(r) = (dxhat.array() - mean_dxhat -
                            xhat.row(r).array() * mean_dxhat_xhat) *
                           inv_sigma(r);
            }
            xp->accumulate(g);
        }
    });
}

NodePtr Tape::dropout(NodePtr a, double p, RngStream& rng) {
    if (p < 0.0 || p >= 1.0) throw ArgumentError("dropout: p must be in [0,1)");
    if (p == 0.0) return a;
    Eigen::MatrixXd mask(a->value.rows(), a->value.cols());
    const double keep_scale = 1.0 / (1.0 - p);
    for (Eigen::Index r = 0; r < mask.rows(); ++r)
        for (Eigen::Index c = 0; c < mask.cols(); ++c)
            mask(r, c) = rng.bernoulli(p) ? 0.0 : keep_scale;
    return mul_elem(a, constant(std::move(mask)));
}

NodePtr Tape::bce_with_logits(NodePtr logits, const Eigen::MatrixXd& targets) {
    if (logits->value.rows() != targets.rows() || logits->value.cols() != targets.cols())
        throw ArgumentError("bce_with_logits: logits " + std::to_string(logits->value.rows()) +
                            "x" + std::to_string(logits->value.cols()) + " vs targets " +
                            std::to_string(targets.rows()) + "x" + std::to_string(targets.cols()));
    const double count = static_cast<double>(targets.size());
    double total = 0.0;
    for (Eigen::Index r = 0; r < targets.rows(); ++r) {
        for (Eigen::Index c = 0; c < targets.cols(); ++c) {
            double z = logits->value(r, c), y = targets(r, c);
            total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
        }
    }
    Eigen::MatrixXd v(1, 1);
    v(0, 0) = total / count;
    return emit(std::move(v), {logits}, [targets, count](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        Eigen::MatrixXd g =
            (sigmoid_values(n.parents[0]->value) - targets) * (n.grad(0, 0) / count);
        n.parents[0]->accumulate(g);
    });
}

} // namespace memeclf::nn
