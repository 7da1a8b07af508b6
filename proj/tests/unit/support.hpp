#pragma once

#include <gtest/gtest.h>

#include "floqryd/error.hpp"

#define EXPECT_CODE(stmt, expected)                                                   \
  do {                                                                                \
    try {                                                                             \
      stmt;                                                                           \
      ADD_FAILURE() << "expected " << floqryd::to_string(expected) << ", no throw";   \
    } catch (const floqryd::Error& e) {                                               \
      EXPECT_EQ(e.code(), expected) << e.what();                                      \
    }                                                                                 \
  } while (0)
