#pragma once

#include <gtest/gtest.h>

#include "surgq/error.hpp"

// Asserts that `stmt` throws a surgq::Error carrying `errc`.
#define EXPECT_ERRC(stmt, errc)                                                                   \
  do {                                                                                            \
    try {                                                                                         \
      stmt;                                                                                       \
      ADD_FAILURE() << #stmt " did not throw";                                                    \
    } catch (const ::surgq::Error& e_) {                                                          \
      EXPECT_EQ(e_.code(), errc) << e_.what();                                                    \
    }                                                                                             \
  } while (0)
