// Copyright 2026 The tridrop Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include "tridrop/bounds.hpp"
#include "tridrop/bubble_geometry.hpp"
#include "tridrop/cli.hpp"
#include "tridrop/competitors.hpp"
#include "tridrop/constants.hpp"
#include "tridrop/core_model.hpp"
#include "tridrop/coulomb.hpp"
#include "tridrop/energy.hpp"
#include "tridrop/error.hpp"
#include "tridrop/io.hpp"
#include "tridrop/optimizer.hpp"
