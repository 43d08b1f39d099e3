// Copyright 2026 The holoverify Authors
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

#include "holoverify/attribution.hpp"
#include "holoverify/augment.hpp"
#include "holoverify/backbones.hpp"
#include "holoverify/baseline.hpp"
#include "holoverify/catalog.hpp"
#include "holoverify/config.hpp"
#include "holoverify/decision.hpp"
#include "holoverify/encoder.hpp"
#include "holoverify/evaluate.hpp"
#include "holoverify/geometry.hpp"
#include "holoverify/image.hpp"
#include "holoverify/metrics.hpp"
#include "holoverify/report.hpp"
#include "holoverify/rng.hpp"
#include "holoverify/splitter.hpp"
#include "holoverify/synthcam.hpp"
#include "holoverify/triplets.hpp"
