#pragma once

#include "tabord/dataset.hpp"
#include "tabord/errors.hpp"
#include "tabord/foe.hpp"
#include "tabord/fusion.hpp"
#include "tabord/global_order.hpp"
#include "tabord/graph.hpp"
#include "tabord/io.hpp"
#include "tabord/pipeline.hpp"
#include "tabord/rewiring.hpp"
