#pragma once

#include "lapoleaf/baseline.hpp"
#include "lapoleaf/core.hpp"
#include "lapoleaf/dataset.hpp"
#include "lapoleaf/distance.hpp"
#include "lapoleaf/incremental.hpp"
#include "lapoleaf/leading_tree.hpp"
#include "lapoleaf/lodog.hpp"
#include "lapoleaf/model.hpp"
#include "lapoleaf/propagation.hpp"
#include "lapoleaf/serialization.hpp"
#include "lapoleaf/synthetic.hpp"
