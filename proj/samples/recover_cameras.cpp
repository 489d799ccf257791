// Tensor of an integer camera pair, then the two camera configurations
// recovered from it.

#include <iostream>

#include "twoslit/twoslit.hpp"
#include "twoslit/worked_examples.hpp"

using namespace twoslit;

int main() {
  const Eigen::IOFormat row(4, 0, ", ", "\n", "  [", "]");
  const EpipolarTensor F = tensor_from_cameras(worked::integer_pair());
  // Adding 0.0 turns -0 into 0 for display.
  std::cout << "tensor (l fastest):\n" << (F.data().array() + 0.0).transpose().format(row) << "\n";

  const auto candidates = recover_minor_matrices(F);
  std::cout << "candidate residuals:";
  for (const auto& c : candidates) std::cout << ' ' << c.residual;
  std::cout << "\n";

  const Configurations conf = two_configurations(candidates.front().C);
  for (const CameraPair* p : {&conf.first, &conf.second}) {
    std::cout << "configuration, tensor distance " << tensor_distance(tensor_from_cameras(*p), F) << "\n";
    std::cout << p->a.A1().format(row) << "\n" << p->a.A2().format(row) << "\n"
              << p->b.A1().format(row) << "\n" << p->b.A2().format(row) << "\n";
  }
}
