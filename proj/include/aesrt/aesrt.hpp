// Copyright 2026 The aesrt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "aesrt/corpus.hpp"
#include "aesrt/error.hpp"
#include "aesrt/keyphrase.hpp"
#include "aesrt/metrics.hpp"
#include "aesrt/perturb/apply.hpp"
#include "aesrt/resources.hpp"
#include "aesrt/rng.hpp"
#include "aesrt/runner/config.hpp"
#include "aesrt/runner/experiments.hpp"
#include "aesrt/runner/report.hpp"
#include "aesrt/runner/sweep.hpp"
#include "aesrt/sample_corpus.hpp"
#include "aesrt/scorer/scorer.hpp"
#include "aesrt/survey/server.hpp"
#include "aesrt/survey/survey.hpp"
#include "aesrt/textops.hpp"
