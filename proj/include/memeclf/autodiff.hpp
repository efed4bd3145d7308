#ifndef MEMECLF_AUTODIFF_HPP
#define MEMECLF_AUTODIFF_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "memeclf/rng.hpp"

namespace memeclf::nn {

// Minimal reverse-mode tape over Eigen matrices. Graphs are rebuilt per
// forward pass; parameters are persistent leaf nodes whose .grad accumulates
// across backward calls until the optimizer clears it.
struct Node {
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad; // lazily sized on first backward touch
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop; // distributes this->grad to parents
    bool requires_grad = false;
    std::string name; // parameters only

    void accumulate(const Eigen::MatrixXd& g) {
        if (grad.size() == 0) grad = Eigen::MatrixXd::Zero(value.rows(), value.cols());
        grad += g;
    }
    void zero_grad() { grad.setZero(); }
};

using NodePtr = std::shared_ptr<Node>;

NodePtr constant(Eigen::MatrixXd value);
NodePtr parameter(Eigen::MatrixXd value, std::string name);

// The tape records creation order of non-leaf nodes; backward() walks it in
// reverse. One tape per forward pass.
class Tape {
public:
    NodePtr emit(Eigen::MatrixXd value, std::vector<NodePtr> parents,
                 std::function<void(Node&)> backprop);

    // Seeds d(loss)/d(loss) = seed and runs the reverse sweep. loss must be
    // the last node emitted on this tape.
    void backward(const NodePtr& loss, double seed = 1.0);

    size_t size() const { return order_.size(); }

    // --- ops ---
    NodePtr add(NodePtr a, NodePtr b);            // equal shapes
    NodePtr add_rowvec(NodePtr a, NodePtr row);   // broadcast 1 x C over R x C
    NodePtr sub(NodePtr a, NodePtr b);
    NodePtr mul_elem(NodePtr a, NodePtr b);
    NodePtr scale(NodePtr a, double s);
    NodePtr matmul(NodePtr a, NodePtr b);         // A * B
    NodePtr matmul_t(NodePtr a, NodePtr b);       // A * B^T
    NodePtr gather_rows(NodePtr table, std::vector<int> rows);
    NodePtr slice_rows(NodePtr a, int from, int count);
    NodePtr slice_cols(NodePtr a, int from, int count);
    NodePtr concat_rows(std::vector<NodePtr> parts);
    NodePtr concat_cols(std::vector<NodePtr> parts);
    NodePtr mean_rows(NodePtr a);                 // R x C -> 1 x C
    NodePtr tanh_(NodePtr a);
    NodePtr sigmoid_(NodePtr a);
    NodePtr gelu_(NodePtr a);
    NodePtr softmax_rows(NodePtr a);
    NodePtr layer_norm(NodePtr x, NodePtr gamma, NodePtr beta, double eps = 1e-5);
    // Inverted dropout with a mask drawn from rng; identity when p == 0.
    NodePtr dropout(NodePtr a, double p, RngStream& rng);
    // Mean over elements of max(z,0) - z*y + log(1+exp(-|z|)); returns 1x1.
    NodePtr bce_with_logits(NodePtr logits, const Eigen::MatrixXd& targets);

private:
    std::vector<NodePtr> order_;
};

Eigen::MatrixXd sigmoid_values(const Eigen::MatrixXd& logits);

} // namespace memeclf::nn

#endif
