"""Result records shared by the services and the CLI."""
