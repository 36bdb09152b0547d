#pragma once

#include "xqa/benchmark.hpp"
#include "xqa/components.hpp"
#include "xqa/explanation.hpp"
#include "xqa/ml/cross_validation.hpp"
#include "xqa/pipeline.hpp"
#include "xqa/service.hpp"
#include "xqa/sparql.hpp"
#include "xqa/store.hpp"
