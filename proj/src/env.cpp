#include "dwrl/env.hpp"

#include "dwrl/envs/cartpole.hpp"
#include "dwrl/envs/gridworld.hpp"
#include "dwrl/envs/pointmass.hpp"
#include "dwrl/error.hpp"

namespace dwrl {

std::unique_ptr<Environment> make_env(const std::string& id) {
  if (id == "gridworld8") return std::make_unique<envs::GridWorld>();
  if (id == "cartpole") return std::make_unique<envs::CartPole>();
  if (id == "pointmass") return std::make_unique<envs::PointMass>();
  throw DomainError("unknown environment id: '" + id + "'");
}

std::vector<std::string> env_ids() { return {"gridworld8", "cartpole", "pointmass"}; }

}  // namespace dwrl
