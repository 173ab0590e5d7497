// Copyright 2026 The AMSS Authors. All Rights Reserved.
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

#ifndef AMSS_AMSS_HPP_
#define AMSS_AMSS_HPP_

#include "amss/acoustics.hpp"
#include "amss/common.hpp"
#include "amss/config.hpp"
#include "amss/features.hpp"
#include "amss/inference_service.hpp"
#include "amss/io.hpp"
#include "amss/masker_bank.hpp"
#include "amss/perception.hpp"
#include "amss/predictor.hpp"
#include "amss/remote_predictor.hpp"
#include "amss/rng.hpp"
#include "amss/selection.hpp"
#include "amss/simulator.hpp"
#include "amss/statistics.hpp"
#include "amss/survey.hpp"
#include "amss/wire.hpp"

#endif  // AMSS_AMSS_HPP_
