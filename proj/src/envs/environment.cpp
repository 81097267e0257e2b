#include "dgrl/envs/environment.hpp"

#include "dgrl/errors.hpp"

namespace dgrl {

void check_action(const ExecutableAction& action, const ActionSpaceSpec& spec) {
  if (!spec.contains(action)) throw ActionError("action outside the action space");
}

}  // namespace dgrl
