// Copyright 2026 The VAM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "vam/cost_model.hpp"
#include "vam/cvm_compare.hpp"
#include "vam/decimal.hpp"
#include "vam/pipeline.hpp"
#include "vam/project.hpp"
#include "vam/report.hpp"
#include "vam/response_batch.hpp"
#include "vam/statistics.hpp"
#include "vam/survey.hpp"
#include "vam/valuation.hpp"
