#pragma once

// The q-series expression language: AST and formatter, parser, evaluator.

#include "qrr/qdsl_ast.hpp"
#include "qrr/qdsl_eval.hpp"
#include "qrr/qdsl_parse.hpp"
