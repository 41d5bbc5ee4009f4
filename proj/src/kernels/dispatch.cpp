#include <cstdlib>
#include <string_view>

#include "difflab/kernels.hpp"

namespace difflab::kernels {

const KernelTable& active() noexcept {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* env = std::getenv("DIFFLAB_KERNELS");
    if (env && std::string_view(env) == "scalar") return scalar_table();
    const KernelTable* fast = avx2_table();
    return fast ? *fast : scalar_table();
  }();
  return table;
}

}  // namespace difflab::kernels
