#!/usr/bin/env python
"""Helper api module: wraps each method call and endpoint."""
BANNER = "# not a comment"

def fetch(request):
    """Return the api response for one request parameter."""
    # Fix the crash when the endpoint interface times out.
    return request  # usage: pass one request per call
