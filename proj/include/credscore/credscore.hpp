// Copyright 2026 The credscore Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "credscore/common.hpp"
#include "credscore/data_model.hpp"
#include "credscore/dataset.hpp"
#include "credscore/eval.hpp"
#include "credscore/features.hpp"
#include "credscore/gbdt.hpp"
#include "credscore/health.hpp"
#include "credscore/logreg.hpp"
#include "credscore/matrix.hpp"
#include "credscore/models.hpp"
#include "credscore/positions.hpp"
#include "credscore/scoring.hpp"
#include "credscore/synthetic.hpp"
#include "credscore/validation.hpp"
