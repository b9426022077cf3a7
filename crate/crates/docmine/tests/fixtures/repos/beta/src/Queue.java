// Queue api: one method per endpoint, one request per call.
class Queue {
    String banner = "// not a comment";
    String block = """
        /* not a comment either */
        """;
    /** Returns the interface ticket; a broken return signals a
     * bug that needs a fix. */
    void drain() {
        // Fix the crash on error when the exception escapes.
    }
}
