"""A small shop library used as a usage-analysis fixture."""
