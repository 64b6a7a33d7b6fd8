#pragma once

#include "matsel/core_model.hpp"
#include "matsel/datastore.hpp"
#include "matsel/error.hpp"
#include "matsel/knowledgebase.hpp"
#include "matsel/metrics.hpp"
#include "matsel/report_json.hpp"
#include "matsel/selector.hpp"
