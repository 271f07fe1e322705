#include "cpf/mc.hpp"

namespace cpf {

void McConfig::validate() const {
  if (n_trajectories < 1) fail(ErrorCode::invalid_argument, "n_trajectories must be >= 1");
  if (chunk_size < 1 || chunk_size > n_trajectories)
    fail(ErrorCode::invalid_argument, "chunk_size must be in [1, n_trajectories]");
  if (path_dt < 0.0 || !std::isfinite(path_dt)) fail(ErrorCode::invalid_argument, "path_dt must be > 0 (or 0 for default)");
}

}  // namespace cpf
