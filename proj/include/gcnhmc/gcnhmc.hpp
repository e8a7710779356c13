// Copyright 2026 The gcnhmc Authors.
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

#ifndef GCNHMC_GCNHMC_HPP
#define GCNHMC_GCNHMC_HPP

#include "gcnhmc/core.hpp"
#include "gcnhmc/enrichment.hpp"
#include "gcnhmc/error.hpp"
#include "gcnhmc/eval.hpp"
#include "gcnhmc/explain.hpp"
#include "gcnhmc/graph.hpp"
#include "gcnhmc/hmc.hpp"
#include "gcnhmc/ingest.hpp"
#include "gcnhmc/learn.hpp"
#include "gcnhmc/ontology.hpp"
#include "gcnhmc/pipeline.hpp"
#include "gcnhmc/spectral.hpp"
#include "gcnhmc/synth.hpp"

#endif  // GCNHMC_GCNHMC_HPP
