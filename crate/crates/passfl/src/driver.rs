//! Two-tier optimizer driver.
