"""Cut-query algorithms with exact query and round accounting."""
