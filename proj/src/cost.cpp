// Copyright 2026 the repml authors
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

#include "repml/cost.hpp"

#include <cmath>

namespace repml {

double eval_cost(const CostPtr& c, const CostEnv& env) {
  auto fail = [](const std::string& msg) -> double {
    throw CompileError(CompileError::Stage::Solve, Loc{}, msg);
  };
  switch (c->k) {
    case CostExpr::K::Lit:
      return c->lit;
    case CostExpr::K::Var: {
      auto it = env.find(c->name);
      if (it == env.end())
        return fail("unbound cost variable '" + c->name +
                    "' (pass --cost-var " + c->name + "=<value>)");
      return it->second;
    }
    case CostExpr::K::Add:
      return eval_cost(c->a, env) + eval_cost(c->b, env);
    case CostExpr::K::Sub:
      return eval_cost(c->a, env) - eval_cost(c->b, env);
    case CostExpr::K::Mul:
      return eval_cost(c->a, env) * eval_cost(c->b, env);
    case CostExpr::K::Div: {
      double d = eval_cost(c->b, env);
      if (d == 0.0) return fail("division by zero in cost expression");
      return eval_cost(c->a, env) / d;
    }
    case CostExpr::K::Min:
      return std::min(eval_cost(c->a, env), eval_cost(c->b, env));
    case CostExpr::K::Max:
      return std::max(eval_cost(c->a, env), eval_cost(c->b, env));
    case CostExpr::K::Log: {
      double v = eval_cost(c->a, env);
      if (v <= 0.0) return fail("log of non-positive value in cost expression");
      return std::log(v);
    }
  }
  return 0.0;  // unreachable
}

CostPtr scale_cost_literals(const CostPtr& c, double k) {
  auto copy = std::make_shared<CostExpr>(*c);
  if (copy->k == CostExpr::K::Lit) {
    copy->lit *= k;
  } else {
    if (copy->a) copy->a = scale_cost_literals(copy->a, k);
    if (copy->b) copy->b = scale_cost_literals(copy->b, k);
  }
  return copy;
}

}  // namespace repml
