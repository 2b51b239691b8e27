#pragma once

#include "fairlens/au_expression.hpp"
#include "fairlens/data_model.hpp"
#include "fairlens/ensemble.hpp"
#include "fairlens/error.hpp"
#include "fairlens/fairness.hpp"
#include "fairlens/geometry.hpp"
#include "fairlens/svg.hpp"
#include "fairlens/table.hpp"
#include "fairlens/trainer.hpp"
#include "fairlens/version.hpp"
