"""Probe module for the queue api endpoint and method table."""

def probe(request):
    '''Send one request and return the api call result.'''
    banner = "# not a comment"
    # Fix the broken exception path; the bug crashes the probe.
    return request  # one request per call
