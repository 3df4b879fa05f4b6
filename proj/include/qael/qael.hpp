// Copyright 2026 The qael developers
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

#ifndef QAEL_QAEL_HPP
#define QAEL_QAEL_HPP

#include "qael/operators.hpp"
#include "qael/modelspec.hpp"
#include "qael/asymptotics.hpp"
#include "qael/reduction.hpp"
#include "qael/simulate.hpp"
#include "qael/models.hpp"
#include "qael/serialize.hpp"

#endif  // QAEL_QAEL_HPP
