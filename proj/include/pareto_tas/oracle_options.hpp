#pragma once

namespace pareto_tas {

struct OracleOptions {
  // Dispatch to the O(p) / O(Kp + p log p) routines when d == 2.
  bool use_2d_fast_path = true;
  // Fault injection for `verify --inject-fault`: evaluates the removal
  // positive part with the arms swapped. Never set outside self-checks.
  bool inject_remove_sign_fault = false;
};

}  // namespace pareto_tas
