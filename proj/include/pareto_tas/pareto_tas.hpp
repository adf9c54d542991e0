#pragma once

#include "pareto_tas/matrix.hpp"
#include "pareto_tas/model.hpp"
#include "pareto_tas/oracle_options.hpp"
#include "pareto_tas/remove_oracle.hpp"
#include "pareto_tas/cell_tree.hpp"
#include "pareto_tas/add_oracle.hpp"
#include "pareto_tas/best_response.hpp"
#include "pareto_tas/learner.hpp"
#include "pareto_tas/datasets.hpp"
#include "pareto_tas/instance_io.hpp"
#include "pareto_tas/generators.hpp"
#include "pareto_tas/experiment.hpp"
